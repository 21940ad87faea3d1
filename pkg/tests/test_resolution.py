"""Symbol resolution, typing, target inference, and generic substitution."""

from __future__ import annotations

import pytest

from maa.parser import parse_component_file, parse_types_file
from maa.resolution import (
    BOOLEAN,
    EnumType,
    INTEGER,
    NODATA_TYPE,
    ParamType,
    SeqType,
    infer_target,
    resolve,
    substitute_generics,
    type_of,
)
from maa.syntax import (
    BoolLit,
    CompilationUnit,
    IntLit,
    NameValue,
    NoData,
    SequenceValue,
    StringLit,
)

from conftest import MODELS, parse_model


def test_empty_model_resolves_clean():
    model, diags = resolve([], [])
    assert diags == []
    assert model.components == {} and model.enums == {}


def test_bump_control_port_types(bump_model):
    rc = bump_model.components["bumperbot.BumpControl"]
    assert rc.port_type["left"] == EnumType("bumperbot.types.MotorCmd")
    assert rc.port_type["cmd"] == EnumType("bumperbot.types.TimerCmd")
    assert rc.port_type["distance"] == INTEGER
    assert rc.port_type["signal"] == BOOLEAN


def test_enum_literal_typing(bump_model):
    rc = bump_model.components["bumperbot.BumpControl"]
    term = NameValue("FORWARD", None)
    assert type_of(term, rc) == EnumType("bumperbot.types.MotorCmd")


def test_sequence_typing(bump_model):
    rc = bump_model.components["bumperbot.BumpControl"]
    seq = SequenceValue([IntLit(3, None), IntLit(14, None)], None)
    assert type_of(seq, rc) == SeqType(INTEGER)
    empty = SequenceValue([], None)
    assert type_of(empty, rc) == SeqType(None)
    assert type_of(NoData(None), rc) is NODATA_TYPE


def test_heterogeneous_sequence_untypable():
    unit = parse_model(MODELS / "reference" / "IntegerDuplicator.maa")
    model, diags = resolve([unit], [])
    assert diags == []
    rc = model.components["IntegerDuplicator"]
    mixed = SequenceValue([StringLit("input is:", None), NameValue("speak", None)], None)
    assert type_of(mixed, rc) is None


def test_unresolved_import_reports_r0():
    text = "package a;\nimport missing.pkg.*;\ncomponent C { }"
    unit = parse_component_file(text, "c.maa")
    assert isinstance(unit, CompilationUnit)
    _model, diags = resolve([unit], [])
    assert [d.code for d in diags] == ["R0"]
    assert diags[0].loc.line == 2


def test_unresolved_port_type_reports_r0():
    unit = parse_component_file("component C { port in Mystery p; }", "c.maa")
    _model, diags = resolve([unit], [])
    assert [d.code for d in diags] == ["R0"]


def test_infer_target_boolean_to_signal(bump_model):
    rc = bump_model.components["bumperbot.BumpControl"]
    candidates = [(p, rc.port_type[p]) for p in rc.in_ports]
    kinds = {p: "in" for p in rc.in_ports}
    result = infer_target(BoolLit(True, None), candidates, rc, kinds)
    assert (result.status, result.name) == ("ok", "signal")


def test_infer_target_ambiguous_integer():
    unit = parse_model(MODELS / "reference" / "ZeroBuffer.maa")
    model, _ = resolve([unit], [])
    rc = model.components["ZeroBuffer"]
    candidates = [("input", INTEGER), ("buffer", INTEGER)]
    kinds = {"input": "in", "buffer": "var"}
    result = infer_target(IntLit(1, None), candidates, rc, kinds)
    assert result.status == "ambiguous"
    assert set(result.candidates) == {"input", "buffer"}


def test_infer_target_no_match(bump_model):
    rc = bump_model.components["bumperbot.BumpControl"]
    result = infer_target(StringLit("x", None), [("distance", INTEGER)], rc,
                          {"distance": "in"})
    assert result.status == "none"


def test_sequence_infers_output_port():
    unit = parse_model(MODELS / "reference" / "Echo1.maa")
    model, _ = resolve([unit], [])
    rc = model.components["Echo1"]
    trans = rc.ast.automata[0].transitions[0]
    assert trans.output[0].resolved_target == "output"


def test_nodata_infers_only_ports():
    unit = parse_model(MODELS / "reference" / "IntegerDuplicator.maa")
    model, _ = resolve([unit], [])
    rc = model.components["IntegerDuplicator"]
    first = rc.ast.automata[0].transitions[0]
    assert first.output[0].resolved_target == "output"


def test_match_inference_in_corpus(bump_model):
    rc = bump_model.components["bumperbot.BumpControl"]
    transitions = rc.ast.automata[0].transitions
    # {true} on the Backing -> Rotating transition reads port signal
    assert transitions[2].input[0].resolved_target == "signal"
    # SINGLE_DELAY goes to the only TimerCmd out-port
    assert transitions[2].output[1].resolved_target == "cmd"


def test_substitute_generics_all_ports(arbiter_model):
    rc = arbiter_model.components["Arbiter"]
    ct = substitute_generics(rc.ast, {"T": BOOLEAN})
    assert ct.generic_params == []
    by_name = {p.name: p.type_name for p in ct.ports}
    assert by_name == {"mode": "Boolean", "in1": "Boolean", "in2": "Boolean",
                       "res": "Boolean"}


def test_substitute_generics_identity(arbiter_model):
    rc = arbiter_model.components["Arbiter"]
    plain = parse_model(MODELS / "reference" / "IntegerBuffer3.maa")
    same = substitute_generics(plain.component, {})
    assert same == plain.component


def test_substitute_generics_enum(arbiter_model, bump_model):
    rc = arbiter_model.components["Arbiter"]
    ct = substitute_generics(rc.ast, {"T": EnumType("bumperbot.types.MotorCmd")})
    assert ct.ports[1].type_name == "bumperbot.types.MotorCmd"


def test_substitute_generics_idempotent(arbiter_model):
    rc = arbiter_model.components["Arbiter"]
    once = substitute_generics(rc.ast, {"T": INTEGER})
    twice = substitute_generics(once, {"T": INTEGER})
    assert once == twice


def test_generic_instantiation_in_pipeline(pipeline_model):
    rc = pipeline_model.components["pipeline.Pipeline"]
    sub = rc.subcomponents["arb"]
    assert sub.target_qname == "pipeline.Arbiter"
    assert sub.port_type["in1"] == INTEGER
    assert sub.port_type["res"] == INTEGER
    assert sub.port_type["mode"] == BOOLEAN


def test_param_type_resolution(arbiter_model):
    rc = arbiter_model.components["Arbiter"]
    assert rc.port_type["in1"] == ParamType("T")


def test_connector_type_mismatch_r0():
    producer = parse_component_file(
        "package p; component A { port out Boolean x; automaton { state S; initial S; } }", "a")
    consumer = parse_component_file(
        "package p; component B { port in Integer y; automaton { state S; initial S; } }", "b")
    top = parse_component_file(
        "package p; component Top { port in Integer unused; "
        "component A a; component B b; connect a.x -> b.y; }", "t")
    model, diags = resolve([producer, consumer, top], [])
    assert any(d.code == "R0" and "type mismatch" in d.message for d in diags)


def test_connector_direction_r0():
    top = parse_component_file(
        "package p; component Top { port in Integer i, out Integer o; "
        "connect o -> i; }", "t")
    _model, diags = resolve([top], [])
    codes = [d.code for d in diags]
    assert codes.count("R0") >= 1


def test_mixed_behavior_and_composition_r0():
    text = ("package p; component A { port in Integer x; automaton { state S; initial S; } }")
    inner = parse_component_file(text, "a")
    mixed = parse_component_file(
        "package p; component M { component A sub; automaton { state S; initial S; } }", "m")
    _model, diags = resolve([inner, mixed], [])
    assert any(d.code == "R0" and "mixes" in d.message for d in diags)


def test_resolution_is_deterministic_across_runs():
    # resolving the same units twice yields byte-identical exports
    from maa.ir import export_ir
    paths = [MODELS / "bumperbot" / "BumpControl.maa"]
    tpaths = [MODELS / "bumperbot" / "types" / "commands.types"]
    from conftest import load_model
    first = export_ir(load_model(paths, tpaths))
    second = export_ir(load_model(paths, tpaths))
    assert first == second


def test_ambiguous_enum_literal_reported():
    t1 = parse_types_file("package p1; enum E1 { GO }", "t1")
    t2 = parse_types_file("package p2; enum E2 { GO }", "t2")
    unit = parse_component_file(
        "package q;\nimport p1.*;\nimport p2.*;\n"
        "component C { port out E1 x; automaton { state S; initial S; S / x = GO; } }", "c")
    from maa.checks import check
    model, rdiags = resolve([unit], [t1, t2])
    diags = rdiags + check(model, "generic")
    assert any(d.code == "R0" and "ambiguous" in d.message for d in diags)
