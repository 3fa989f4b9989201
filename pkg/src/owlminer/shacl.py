"""Transformation of mined patterns into SHACL shape graphs.

Two vocabularies are supported: the early-draft style (`sh:predicate`,
constraints nested under `sh:constraint`) that the default output follows,
and the W3C Recommendation style (`sh:path`, constraint properties stated
directly on the node) behind `modern_vocab=True`.

Literal-bound ranges emit the coherent pairing — an upper bound becomes
`sh:maxInclusive`, a lower bound `sh:minInclusive`. `paper_literal_bounds=True`
swaps the two keywords for byte-compatibility with older exports.

Conjunct order is preserved: callers who want canonical output canonicalize
the pattern first.
"""

from __future__ import annotations

from dataclasses import dataclass

from . import turtle
from .patterns import (
    And,
    AndRange,
    Datatype,
    Enum,
    EnumLiteral,
    MaxInclusive,
    MinInclusive,
    NamedClass,
    SelfRestriction,
    SomeData,
    SomeObject,
    ValueData,
    ValueObject,
)
from .terms import (
    RDF_FIRST,
    RDF_NIL,
    RDF_REST,
    RDF_TYPE,
    SHACL_NS,
    XSD_NS,
    BlankNode,
    Iri,
    Literal,
    PrefixMap,
    RdfTerm,
    Triple,
)

SH_SHAPE = Iri(SHACL_NS + "Shape")
SH_PROPERTY = Iri(SHACL_NS + "property")
SH_PREDICATE = Iri(SHACL_NS + "predicate")
SH_PATH = Iri(SHACL_NS + "path")
SH_CONSTRAINT = Iri(SHACL_NS + "constraint")
SH_HAS_VALUE = Iri(SHACL_NS + "hasValue")
SH_AND = Iri(SHACL_NS + "and")
SH_IN = Iri(SHACL_NS + "in")
SH_QUALIFIED_VALUE_SHAPE = Iri(SHACL_NS + "qualifiedValueShape")
SH_QUALIFIED_MIN_COUNT = Iri(SHACL_NS + "qualifiedMinCount")
SH_DATATYPE = Iri(SHACL_NS + "datatype")
SH_MIN_INCLUSIVE = Iri(SHACL_NS + "minInclusive")
SH_MAX_INCLUSIVE = Iri(SHACL_NS + "maxInclusive")
SH_SPARQL_CONSTRAINT = Iri(SHACL_NS + "SPARQLConstraint")
SH_SPARQL = Iri(SHACL_NS + "sparql")
SH_SELECT = Iri(SHACL_NS + "select")

DEFAULT_SHAPE_NAMESPACE = "urn:shapes:"

_ONE = Literal("1", datatype=XSD_NS + "integer")


class ShapeNamer:
    """Deterministic shape-IRI generator in a caller-chosen namespace."""

    def __init__(self, namespace: str = DEFAULT_SHAPE_NAMESPACE, start: int = 1):
        self.namespace = namespace
        self._next = start

    def __call__(self) -> Iri:
        iri = Iri("%sshape%d" % (self.namespace, self._next))
        self._next += 1
        return iri


@dataclass(frozen=True)
class ShapeGraph:
    triples: tuple[Triple, ...]
    root: RdfTerm

    def to_turtle(self, prefixes: PrefixMap | None = None) -> str:
        return turtle.write_turtle(self.triples, prefixes)


def reflexivity_check_query(prop: Iri) -> str:
    """One violation row per triple over `prop` whose object differs from
    its subject; shapes embed this text, nothing here executes it."""
    return (
        "SELECT $this ($this AS ?subject) (<%(p)s> AS ?predicate) (?value AS ?object) "
        "WHERE { $this <%(p)s> ?value . FILTER NOT EXISTS (sameTerm($this, ?value)) }"
        % {"p": prop.value}
    )


class _Builder:
    def __init__(self, namer: ShapeNamer, modern: bool, paper_bounds: bool):
        self.namer = namer
        self.modern = modern
        self.paper_bounds = paper_bounds
        self.triples: list[Triple] = []
        self._blanks = 0

    def _blank(self) -> BlankNode:
        self._blanks += 1
        return BlankNode("b%d" % self._blanks)

    def add(self, s, p, o):
        self.triples.append(Triple(s, p, o))

    def rdf_list(self, items) -> RdfTerm:
        if not items:
            return RDF_NIL
        cells = [self._blank() for _ in items]
        for i, item in enumerate(items):
            self.add(cells[i], RDF_FIRST, item)
            self.add(cells[i], RDF_REST, cells[i + 1] if i + 1 < len(cells) else RDF_NIL)
        return cells[0]

    def _property_box(self, node) -> BlankNode:
        box = self._blank()
        self.add(node, SH_PROPERTY, box)
        return box

    def _predicate(self, box, prop: Iri):
        self.add(box, SH_PATH if self.modern else SH_PREDICATE, prop)

    def _constraint_target(self, node):
        # the draft vocabulary nests node constraints one level deeper
        if self.modern:
            return node
        box = self._blank()
        self.add(node, SH_CONSTRAINT, box)
        return box

    def class_node(self, pattern, node=None) -> RdfTerm:
        node = self._blank() if node is None else node
        if isinstance(pattern, NamedClass):
            box = self._property_box(node)
            self._predicate(box, RDF_TYPE)
            self.add(box, SH_HAS_VALUE, pattern.iri)
        elif isinstance(pattern, ValueObject):
            box = self._property_box(node)
            self._predicate(box, pattern.prop)
            self.add(box, SH_HAS_VALUE, pattern.individual)
        elif isinstance(pattern, ValueData):
            box = self._property_box(node)
            self._predicate(box, pattern.prop)
            self.add(box, SH_HAS_VALUE, pattern.literal)
        elif isinstance(pattern, And):
            subs = [self.class_node(op) for op in pattern.operands]
            self.add(self._constraint_target(node), SH_AND, self.rdf_list(subs))
        elif isinstance(pattern, Enum):
            self.add(self._constraint_target(node), SH_IN, self.rdf_list([pattern.term]))
        elif isinstance(pattern, SelfRestriction):
            query = Literal(reflexivity_check_query(pattern.prop))
            if self.modern:
                box = self._blank()
                self.add(node, SH_SPARQL, box)
                self.add(box, RDF_TYPE, SH_SPARQL_CONSTRAINT)
                self.add(box, SH_SELECT, query)
            else:
                box = self._constraint_target(node)
                self.add(box, RDF_TYPE, SH_SPARQL_CONSTRAINT)
                self.add(box, SH_SPARQL, query)
        elif isinstance(pattern, SomeObject):
            box = self._property_box(node)
            self._predicate(box, pattern.prop)
            self.add(box, SH_QUALIFIED_MIN_COUNT, _ONE)
            self.add(box, SH_QUALIFIED_VALUE_SHAPE, self.class_node(pattern.filler))
        elif isinstance(pattern, SomeData):
            box = self._property_box(node)
            self._predicate(box, pattern.prop)
            self.add(box, SH_QUALIFIED_MIN_COUNT, _ONE)
            self.add(box, SH_QUALIFIED_VALUE_SHAPE, self.range_node(pattern.range))
        else:
            raise TypeError("not a class pattern: %r" % (pattern,))
        return node

    def range_node(self, data_range, node=None) -> RdfTerm:
        node = self._blank() if node is None else node
        if isinstance(data_range, Datatype):
            self.add(self._constraint_target(node), SH_DATATYPE, data_range.dt)
        elif isinstance(data_range, AndRange):
            subs = [self.range_node(op) for op in data_range.operands]
            self.add(self._constraint_target(node), SH_AND, self.rdf_list(subs))
        elif isinstance(data_range, EnumLiteral):
            self.add(self._constraint_target(node), SH_IN, self.rdf_list([data_range.literal]))
        elif isinstance(data_range, MaxInclusive):  # upper bound
            box = self._constraint_target(node)
            self.add(box, SH_DATATYPE, data_range.dt)
            keyword = SH_MIN_INCLUSIVE if self.paper_bounds else SH_MAX_INCLUSIVE
            self.add(box, keyword, data_range.bound)
        elif isinstance(data_range, MinInclusive):  # lower bound
            box = self._constraint_target(node)
            self.add(box, SH_DATATYPE, data_range.dt)
            keyword = SH_MAX_INCLUSIVE if self.paper_bounds else SH_MIN_INCLUSIVE
            self.add(box, keyword, data_range.bound)
        else:
            raise TypeError("not a data range: %r" % (data_range,))
        return node


def _named(builder: _Builder) -> Iri:
    shape = builder.namer()
    builder.add(shape, RDF_TYPE, SH_SHAPE)
    return shape


def to_shacl(pattern, namer: ShapeNamer | None = None, *, modern_vocab: bool = False,
             paper_literal_bounds: bool = False) -> ShapeGraph:
    """Render one class pattern as a shape graph.

    The pattern itself gets a named, `sh:Shape`-typed node; so does each
    direct conjunct of a top-level conjunction (conjuncts are numbered
    before the conjunction, so a fresh namer reads top to bottom). All
    deeper structure stays anonymous.
    """
    builder = _Builder(namer or ShapeNamer(), modern_vocab, paper_literal_bounds)
    if isinstance(pattern, And):
        subs = [_named(builder) for _ in pattern.operands]
        for sub, operand in zip(subs, pattern.operands):
            builder.class_node(operand, node=sub)
        root = _named(builder)
        builder.add(builder._constraint_target(root), SH_AND, builder.rdf_list(subs))
    else:
        root = _named(builder)
        builder.class_node(pattern, node=root)
    return ShapeGraph(tuple(builder.triples), root)


def to_shacl_range(data_range, namer: ShapeNamer | None = None, *, modern_vocab: bool = False,
                   paper_literal_bounds: bool = False) -> ShapeGraph:
    """Render one data range as a shape graph; mirrors `to_shacl`."""
    builder = _Builder(namer or ShapeNamer(), modern_vocab, paper_literal_bounds)
    if isinstance(data_range, AndRange):
        subs = [_named(builder) for _ in data_range.operands]
        for sub, operand in zip(subs, data_range.operands):
            builder.range_node(operand, node=sub)
        root = _named(builder)
        builder.add(builder._constraint_target(root), SH_AND, builder.rdf_list(subs))
    else:
        root = _named(builder)
        builder.range_node(data_range, node=root)
    return ShapeGraph(tuple(builder.triples), root)


def shapes_document(patterns, namer: ShapeNamer | None = None,
                    prefixes: PrefixMap | None = None, *, modern_vocab: bool = False,
                    paper_literal_bounds: bool = False) -> str:
    """One Turtle document holding the shapes of several patterns.

    Shape names stay unique because all patterns share one namer; blank
    labels are disambiguated per pattern.
    """
    namer = namer or ShapeNamer()
    prefixes = PrefixMap() if prefixes is None else prefixes
    merged = PrefixMap()
    merged.update(prefixes)
    merged.bind("sh", SHACL_NS)
    merged.bind("xsd", XSD_NS)
    if namer.namespace == DEFAULT_SHAPE_NAMESPACE:
        merged.bind("", DEFAULT_SHAPE_NAMESPACE)
    graphs = [
        to_shacl(pattern, namer, modern_vocab=modern_vocab,
                 paper_literal_bounds=paper_literal_bounds)
        for pattern in patterns
    ]
    return turtle.write_turtle(merge_shape_graphs(graphs), merged)


def merge_shape_graphs(graphs) -> tuple[Triple, ...]:
    """Union of several shape graphs with blank labels kept apart.

    Blank nodes are scoped to their own graph, so a naive concatenation
    would fuse the `b1` of one shape with the `b1` of the next.
    """
    out: list[Triple] = []
    for i, graph in enumerate(graphs):
        rename: dict = {}
        for t in graph.triples:
            out.append(Triple(_relabel(t.subject, i, rename),
                              t.predicate,
                              _relabel(t.object, i, rename)))
    return tuple(out)


def _relabel(term, i, cache):
    if isinstance(term, BlankNode):
        if term not in cache:
            cache[term] = BlankNode("p%d_%s" % (i, term.label))
        return cache[term]
    return term
