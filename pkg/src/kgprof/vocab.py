"""Well-known RDF/RDFS/OWL IRIs, stored in their canonical N-Triples form."""

RDF = "http://www.w3.org/1999/02/22-rdf-syntax-ns#"
RDFS = "http://www.w3.org/2000/01/rdf-schema#"
OWL = "http://www.w3.org/2002/07/owl#"
XSD = "http://www.w3.org/2001/XMLSchema#"
SKOS = "http://www.w3.org/2004/02/skos/core#"

RESERVED_NAMESPACES = (RDF, RDFS, OWL, XSD)


def iri(value):
    """Return the canonical key (``<...>``) of an IRI string."""
    return "<" + value + ">"


RDF_TYPE = iri(RDF + "type")
RDFS_SUBCLASSOF = iri(RDFS + "subClassOf")
RDFS_SUBPROPERTYOF = iri(RDFS + "subPropertyOf")
RDFS_LABEL = iri(RDFS + "label")
RDFS_CLASS = iri(RDFS + "Class")
OWL_CLASS = iri(OWL + "Class")
OWL_THING = iri(OWL + "Thing")
OWL_SAMEAS = iri(OWL + "sameAs")
OWL_OBJECT_PROPERTY = iri(OWL + "ObjectProperty")
OWL_DATATYPE_PROPERTY = iri(OWL + "DatatypeProperty")

# rdf:type objects that make their subject a schema element rather than an instance.
META_CLASSES = frozenset({OWL_CLASS, RDFS_CLASS})

_RESERVED_KEY_PREFIXES = tuple("<" + ns for ns in RESERVED_NAMESPACES)


def is_reserved(key):
    """True for IRIs in the RDF, RDFS, OWL or XSD namespaces."""
    return key.startswith(_RESERVED_KEY_PREFIXES)


def local_name(key):
    """Short display name of an IRI key: the part after the last ``#`` or ``/``."""
    value = key[1:-1] if key.startswith("<") else key
    for sep in ("#", "/", ":"):
        pos = value.rstrip(sep).rfind(sep)
        if pos >= 0 and pos < len(value) - 1:
            return value[pos + 1 :]
    return value
