"""Contract ingestion: parsing, derivation, conservation, emitted DSL."""

import xml.etree.ElementTree as ET
from collections import Counter

import pytest

from muit.dsl import analyze
from muit.wsdl import (
    SCALAR_TYPE_MAP,
    UnsupportedStyleError,
    UnsupportedTypeError,
    WsdlParseError,
    derive_ui_model,
    emit_dsl,
    import_wsdl,
    parse_wsdl,
)
from tests.conftest import fixture_path

XSD_NS = "http://www.w3.org/2001/XMLSchema"


def load(name: str) -> str:
    return fixture_path(name).read_text()


def xml_scalar_leaves(text: str) -> Counter:
    """Independent oracle: walk the raw XML and count every element
    whose type is an XML-Schema scalar, mapped to its UI type name."""
    root = ET.fromstring(text)
    leaves: Counter = Counter()
    for el in root.iter(f"{{{XSD_NS}}}element"):
        type_attr = el.get("type")
        if type_attr is None or ":" not in type_attr:
            continue
        local = type_attr.split(":", 1)[1]
        if local in SCALAR_TYPE_MAP:
            leaves[(el.get("name"), SCALAR_TYPE_MAP[local])] += 1
    return leaves


# --- parsing -------------------------------------------------------------


def test_parse_reimbursement_contract():
    service = parse_wsdl(load("reimbursement_task.wsdl"))
    assert service.name == "reimbursementTask"
    assert service.port_type == "reimbursementTaskPortType"
    assert service.address == "http://www.pku.edu.cn/MUIT/reimbursementTask.js"
    assert [op.name for op in service.operations] == ["getTaskInfo"]
    assert service.operations[0].soap_action == "urn:getTaskInfo"
    assert set(service.complex_types) == {"Task"}
    assert [e.name for e in service.complex_types["Task"].elements] == [
        "task_name",
        "status",
        "createDate",
        "dueDate",
    ]


def test_parse_approval_contract():
    service = parse_wsdl(load("approval_tasks.wsdl"))
    assert service.name == "approvalTasks"
    assert len(service.operations) == 4
    assert len(service.messages) == 8
    assert set(service.complex_types) == {"Task", "Role"}


def test_malformed_xml_rejected():
    with pytest.raises(WsdlParseError):
        parse_wsdl("<definitions>")


def test_non_wsdl_root_rejected():
    with pytest.raises(WsdlParseError):
        parse_wsdl("<other/>")


def test_rpc_style_binding_rejected():
    text = load("reimbursement_task.wsdl").replace('style="document"', 'style="rpc"')
    with pytest.raises(UnsupportedStyleError):
        parse_wsdl(text)


def test_encoded_use_rejected():
    text = load("reimbursement_task.wsdl").replace('use="literal"', 'use="encoded"')
    with pytest.raises(UnsupportedStyleError):
        parse_wsdl(text)


def test_type_part_rejected():
    text = load("reimbursement_task.wsdl").replace(
        '<part name="parameters" element="tns:getTaskInfo"/>',
        '<part name="parameters" type="xs:string"/>',
    )
    with pytest.raises(UnsupportedStyleError):
        parse_wsdl(text)


def test_unknown_message_reference_rejected():
    text = load("reimbursement_task.wsdl").replace(
        'input message="tns:getTaskInfoRequest"', 'input message="tns:ghost"'
    )
    with pytest.raises(WsdlParseError):
        parse_wsdl(text)


def test_unsupported_scalar_type_rejected():
    text = load("reimbursement_task.wsdl").replace(
        'type="xs:string"', 'type="xs:hexBinary"'
    )
    with pytest.raises(UnsupportedTypeError):
        derive_ui_model(parse_wsdl(text))


# --- derivation ----------------------------------------------------------


def test_reimbursement_model_shape():
    model = derive_ui_model(parse_wsdl(load("reimbursement_task.wsdl")))
    assert model.service_url == "http://www.pku.edu.cn/MUIT/reimbursementTask.js"
    assert [e.name for e in model.entities] == ["Task"]
    task = model.entities[0]
    assert [(p.name, p.type_text) for p in task.properties] == [
        ("task_name", "String"),
        ("status", "String"),
        ("createDate", "DateTime"),
        ("dueDate", "DateTime"),
    ]
    op = model.operations[0]
    assert op.name == "getTaskInfo"
    assert op.params == []
    assert op.returns == "list<Task>"
    assert op.returns_list and op.returns_entity == "Task"


def test_approval_model_operations():
    model = derive_ui_model(parse_wsdl(load("approval_tasks.wsdl")))
    ops = {op.name: op for op in model.operations}
    assert set(ops) == {"getTaskInfo", "approveTask", "delayTask", "searchTask"}
    assert [(p.name, p.type_text) for p in ops["delayTask"].params] == [
        ("taskname", "String"),
        ("days", "int"),
        ("reason", "String"),
    ]
    # Scalar outputs surface as synthesized result entities.
    assert ops["approveTask"].returns == "ApproveTaskResult"
    assert ops["delayTask"].returns == "DelayTaskResult"
    assert ops["searchTask"].returns == "list<Task>"
    names = [e.name for e in model.entities]
    assert "ApproveTaskResult" in names and "DelayTaskResult" in names


def test_void_output_becomes_controller_event():
    text = load("reimbursement_task.wsdl").replace(
        """    <operation name="getTaskInfo">
      <input message="tns:getTaskInfoRequest"/>
      <output message="tns:getTaskInfoResponse"/>
    </operation>
  </portType>""",
        """    <operation name="getTaskInfo">
      <input message="tns:getTaskInfoRequest"/>
    </operation>
  </portType>""",
    )
    model = derive_ui_model(parse_wsdl(text))
    op = model.operations[0]
    assert op.is_event
    assert op.returns is None


def test_views_cover_operations():
    model = derive_ui_model(parse_wsdl(load("approval_tasks.wsdl")))
    views = {v.name: v for v in model.views}
    assert views["getTaskInfo_list"].kind == "list"
    assert views["Task_detail"].kind == "detail"
    assert views["approveTask_form"].kind == "form"
    assert views["delayTask_form"].kind == "form"
    assert views["searchTask_form"].kind == "form"


# --- conservation --------------------------------------------------------


@pytest.mark.parametrize(
    "fixture", ["reimbursement_task.wsdl", "approval_tasks.wsdl"]
)
def test_scalar_field_conservation(fixture):
    text = load(fixture)
    model = derive_ui_model(parse_wsdl(text))
    derived = Counter(model.scalar_leaves())
    assert derived == xml_scalar_leaves(text)


def test_approval_leaf_count_is_thirteen():
    # Hand count: Task 4 + Role 2 + approve 1+1 + delay 3+1 + search 1.
    assert sum(xml_scalar_leaves(load("approval_tasks.wsdl")).values()) == 13


# --- emitted DSL ---------------------------------------------------------


@pytest.mark.parametrize(
    "fixture", ["reimbursement_task.wsdl", "approval_tasks.wsdl"]
)
def test_emitted_dsl_compiles_clean(fixture):
    model, source = import_wsdl(load(fixture))
    result = analyze(source)
    assert result.ok, [d.format() for d in result.sink.errors]
    assert not result.sink.warnings, [d.format() for d in result.sink.warnings]


def test_emitted_dsl_round_trips_model_names():
    model, source = import_wsdl(load("approval_tasks.wsdl"))
    result = analyze(source)
    module = result.module
    assert {e.name for e in model.entities} <= {e.name for e in module.entities}
    for op in model.operations:
        assert module.operation(op.name) is not None
    assert module.operation("import") is not None
    # Entry screen is the task list.
    assert module.screens[0].name == "getTaskInfo_list"


def test_emitted_service_url():
    _, source = import_wsdl(load("reimbursement_task.wsdl"))
    assert 'var service_url = "http://www.pku.edu.cn/MUIT/reimbursementTask.js";' in source


def test_identifier_sanitization():
    text = load("reimbursement_task.wsdl").replace(
        'name="task_name"', 'name="task-name"'
    )
    model, source = import_wsdl(text)
    assert "task_name" in source
    assert analyze(source).ok
