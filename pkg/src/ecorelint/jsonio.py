"""Self-defined JSON rendering of an Ecore model (not the EMF-JSON schema of any
particular tool). One object per element, containment as nested arrays,
references as their serialized text.
"""
from __future__ import annotations

import json
from typing import Any

from .metamodel import (
    EAnnotationNode, EAttributeNode, EClassNode, EDataTypeNode, EEnumLiteralNode, EEnumNode,
    EOperationNode, EPackageNode, EParameterNode, EReferenceNode, EcoreModel, ElementExtras,
    TypeRef, XNode, resolve_types,
)

# keys holding contained elements rather than field values
CONTAINMENT_KEYS = ("classifiers", "subpackages", "features", "operations", "parameters",
                    "literals")


def _ref(ref: TypeRef | None):
    return ref.raw if ref is not None else None


def annotation_to_json(ann: EAnnotationNode) -> dict:
    out = {"source": ann.source,
           "details": [{"key": k, "value": v} for k, v in ann.details]}
    if not ann.extras.is_empty():
        out["extras"] = ann.extras.to_json()
    return out


def element_fields(node) -> dict[str, Any]:
    """Modeled field values of one element, keyed as in the JSON export."""
    out: dict[str, Any] = {"kind": node.kind, "name": node.name}
    if isinstance(node, EPackageNode):
        out.update(nsURI=node.ns_uri, nsPrefix=node.ns_prefix)
    elif isinstance(node, EClassNode):
        out.update(abstract=node.abstract, interface=node.interface,
                   superTypes=[r.raw for r in node.super_types])
    elif isinstance(node, EDataTypeNode):
        out["instanceTypeName"] = node.instance_type_name
    elif isinstance(node, EEnumLiteralNode):
        out.update(value=node.value, literal=node.literal)
    elif isinstance(node, (EAttributeNode, EReferenceNode)):
        out.update(eType=_ref(node.e_type), lowerBound=node.lower_bound,
                   upperBound=node.upper_bound, changeable=node.changeable,
                   derived=node.derived, defaultValueLiteral=node.default_value_literal)
        if isinstance(node, EReferenceNode):
            out.update(containment=node.containment, eOpposite=_ref(node.opposite))
    elif isinstance(node, (EOperationNode, EParameterNode)):
        typ = node.return_type if isinstance(node, EOperationNode) else node.e_type
        out.update(eType=_ref(typ), lowerBound=node.lower_bound, upperBound=node.upper_bound)
    out["annotations"] = [annotation_to_json(a) for a in node.annotations]
    return out


def element_to_json(node) -> dict:
    out = element_fields(node)
    if isinstance(node, EPackageNode):
        out["classifiers"] = [element_to_json(c) for c in node.classifiers]
        out["subpackages"] = [element_to_json(p) for p in node.subpackages]
    elif isinstance(node, EClassNode):
        out["features"] = [element_to_json(f) for f in node.features]
        out["operations"] = [element_to_json(o) for o in node.operations]
    elif isinstance(node, EEnumNode):
        out["literals"] = [element_to_json(lit) for lit in node.literals]
    elif isinstance(node, EOperationNode):
        out["parameters"] = [element_to_json(p) for p in node.parameters]
    if not node.extras.is_empty():
        out["extras"] = node.extras.to_json()
    return out


def model_to_json(model: EcoreModel) -> dict:
    doc = element_to_json(model.root_package)
    if model.prolog:
        doc["prolog"] = [n.to_json() for n in model.prolog]
    return doc


def export_json(model: EcoreModel) -> bytes:
    return (json.dumps(model_to_json(model), indent=2, ensure_ascii=False) + "\n").encode("utf-8")


# -- reading back ---------------------------------------------------------------------

def _annotation(data: dict) -> EAnnotationNode:
    return EAnnotationNode(
        source=data["source"],
        details=[(d["key"], d["value"]) for d in data.get("details", [])],
        extras=ElementExtras.from_json(data.get("extras", {})),
    )


def _tref(value):
    return TypeRef(value) if value is not None else None


def element_from_json(data: dict):
    kind = data["kind"]
    common = dict(
        name=data["name"],
        annotations=[_annotation(a) for a in data.get("annotations", [])],
        extras=ElementExtras.from_json(data.get("extras", {})),
    )
    if kind == "EPackage":
        return EPackageNode(
            ns_uri=data.get("nsURI", ""), ns_prefix=data.get("nsPrefix", ""),
            classifiers=[element_from_json(c) for c in data.get("classifiers", [])],
            subpackages=[element_from_json(p) for p in data.get("subpackages", [])],
            **common)
    if kind == "EClass":
        return EClassNode(
            abstract=data.get("abstract", False), interface=data.get("interface", False),
            super_types=[TypeRef(r) for r in data.get("superTypes", [])],
            features=[element_from_json(f) for f in data.get("features", [])],
            operations=[element_from_json(o) for o in data.get("operations", [])],
            **common)
    if kind == "EDataType":
        return EDataTypeNode(instance_type_name=data.get("instanceTypeName"), **common)
    if kind == "EEnum":
        return EEnumNode(literals=[element_from_json(x) for x in data.get("literals", [])],
                         **common)
    if kind == "EEnumLiteral":
        return EEnumLiteralNode(value=data.get("value", 0), literal=data.get("literal"),
                                **common)
    bounds = dict(lower_bound=data.get("lowerBound", 0), upper_bound=data.get("upperBound", 1))
    if kind in ("EAttribute", "EReference"):
        feature_fields = dict(
            e_type=_tref(data.get("eType")), changeable=data.get("changeable", True),
            derived=data.get("derived", False),
            default_value_literal=data.get("defaultValueLiteral"), **bounds, **common)
        if kind == "EAttribute":
            return EAttributeNode(**feature_fields)
        return EReferenceNode(containment=data.get("containment", False),
                              opposite=_tref(data.get("eOpposite")), **feature_fields)
    if kind == "EOperation":
        return EOperationNode(return_type=_tref(data.get("eType")),
                              parameters=[element_from_json(p)
                                          for p in data.get("parameters", [])],
                              **bounds, **common)
    if kind == "EParameter":
        return EParameterNode(e_type=_tref(data.get("eType")), **bounds, **common)
    raise ValueError(f"unknown element kind {kind!r}")


def parse_json(data: bytes | str, source_uri: str = "") -> EcoreModel:
    doc = json.loads(data)
    root = element_from_json(doc)
    if not isinstance(root, EPackageNode):
        raise ValueError("JSON document root must be an EPackage")
    model = EcoreModel(root, source_uri=source_uri,
                       prolog=[XNode.from_json(n) for n in doc.get("prolog", [])])
    resolve_types(model)
    return model
