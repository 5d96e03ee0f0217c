"""Derives a UI model from a parsed service contract.

Every scalar schema field surfaces exactly once: complex types become
entities, operation inputs become parameters, scalar outputs become a
synthesized result entity.  Void-outcome operations become controller
events instead of model operations.
"""

from .model import (
    ComplexType,
    SchemaElement,
    UiEntity,
    UiModel,
    UiOperation,
    UiParam,
    UiProperty,
    UiView,
    UnsupportedTypeError,
    WsdlService,
)

SCALAR_TYPE_MAP = {
    "string": "String",
    "int": "int",
    "integer": "int",
    "long": "int",
    "short": "int",
    "boolean": "boolean",
    "date": "DateTime",
    "dateTime": "DateTime",
}


def map_scalar(xsd_name: str) -> str:
    if xsd_name not in SCALAR_TYPE_MAP:
        raise UnsupportedTypeError(f"no mapping for schema type {xsd_name!r}")
    return SCALAR_TYPE_MAP[xsd_name]


def _element_type_text(el: SchemaElement, service: WsdlService) -> str:
    if el.is_scalar:
        base = map_scalar(el.type_name)
    elif el.type_name in service.complex_types:
        base = el.type_name
    else:
        raise UnsupportedTypeError(
            f"element {el.name!r} has unsupported type {el.type_name!r}"
        )
    return f"list<{base}>" if el.many else base


def _entity_from_complex(ct: ComplexType, service: WsdlService) -> UiEntity:
    entity = UiEntity(name=ct.name)
    for el in ct.elements:
        entity.properties.append(
            UiProperty(
                name=el.name,
                type_text=_element_type_text(el, service),
                is_scalar=el.is_scalar,
            )
        )
    return entity


def _result_entity_name(op_name: str) -> str:
    return op_name[:1].upper() + op_name[1:] + "Result"


def derive_ui_model(service: WsdlService) -> UiModel:
    model = UiModel(service_name=service.name, service_url=service.address)

    for ct in service.complex_types.values():
        model.entities.append(_entity_from_complex(ct, service))

    for port_op in service.operations:
        op = UiOperation(name=port_op.name)

        if port_op.input_message is not None:
            in_root = service.messages[port_op.input_message].element
            in_shape = service.root_elements.get(in_root)
            if in_shape is None:
                raise UnsupportedTypeError(
                    f"operation {port_op.name!r} input element {in_root!r} is undefined"
                )
            for el in in_shape.elements:
                op.params.append(
                    UiParam(
                        name=el.name,
                        type_text=_element_type_text(el, service),
                        is_scalar=el.is_scalar,
                    )
                )

        out_shape = None
        if port_op.output_message is not None:
            out_root = service.messages[port_op.output_message].element
            out_shape = service.root_elements.get(out_root)
            if out_shape is None:
                raise UnsupportedTypeError(
                    f"operation {port_op.name!r} output element {out_root!r} is undefined"
                )

        if out_shape is None or not out_shape.elements:
            # No reply payload: a fire-and-forget controller event.
            op.is_event = True
        else:
            elements = out_shape.elements
            if len(elements) == 1 and not elements[0].is_scalar:
                el = elements[0]
                op.returns = _element_type_text(el, service)
                op.returns_entity = el.type_name
                op.returns_list = el.many
            else:
                # Scalar or mixed outputs become a synthesized result
                # entity so no field is dropped.
                result = UiEntity(name=_result_entity_name(port_op.name), synthesized=True)
                for el in elements:
                    result.properties.append(
                        UiProperty(
                            name=el.name,
                            type_text=_element_type_text(el, service),
                            is_scalar=el.is_scalar,
                        )
                    )
                model.entities.append(result)
                op.returns = result.name
                op.returns_entity = result.name
                op.returns_list = False
        model.operations.append(op)

    _derive_views(model)
    return model


def _derive_views(model: UiModel) -> None:
    """Default screens: a list view per list-returning operation, a
    detail view per listed entity, a form per parameterized operation,
    and a plain action view for parameterless events."""
    detail_entities: list[str] = []
    for op in model.operations:
        if op.returns_list and op.returns_entity and not op.params:
            model.views.append(
                UiView(name=f"{op.name}_list", kind="list", operation=op.name, entity=op.returns_entity)
            )
            if op.returns_entity not in detail_entities:
                detail_entities.append(op.returns_entity)
    for entity in detail_entities:
        model.views.append(UiView(name=f"{entity}_detail", kind="detail", entity=entity))
    for op in model.operations:
        if op.params:
            model.views.append(
                UiView(name=f"{op.name}_form", kind="form", operation=op.name)
            )
        elif not (op.returns_list and op.returns_entity):
            model.views.append(
                UiView(name=f"{op.name}_action", kind="action", operation=op.name)
            )
