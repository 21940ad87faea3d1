"""Parser behavior: corpus structure, error reporting, order freedom."""

from __future__ import annotations

from maa.parser import parse_component_file, parse_types_file
from maa.syntax import (
    CompilationUnit,
    IntLit,
    NoData,
    SequenceValue,
    StringLit,
    TypeDeclUnit,
)

from conftest import CORPUS, MODELS, parse_model


def test_whole_corpus_parses_without_syn():
    for name, (paths, _profile, _types) in CORPUS.items():
        for path in paths:
            parse_model(path)  # asserts on failure


def test_bump_control_structure():
    unit = parse_model(MODELS / "bumperbot" / "BumpControl.maa")
    assert unit.package == "bumperbot"
    assert [i.name for i in unit.imports] == ["bumperbot.types.*"]
    comp = unit.component
    assert comp.name == "BumpControl"
    assert len(comp.ports) == 5
    assert [p.direction for p in comp.ports].count("in") == 2
    assert [p.direction for p in comp.ports].count("out") == 3
    assert len(comp.automata) == 1
    auto = comp.automata[0]
    assert auto.name is None
    assert [s.name for s in auto.states] == ["Idle", "Driving", "Backing", "Rotating"]
    assert len(auto.initials) == 1
    assert auto.initials[0].state == "Idle"
    assert len(auto.transitions) == 4


def test_state_stereotype_parsed():
    unit = parse_model(MODELS / "reference" / "IntegerBuffer4.maa")
    states = unit.component.automata[0].states
    assert [s.name for s in states] == ["S", "T"]
    assert states[1].stereotypes == ["error"]
    assert states[0].stereotypes == []


def test_automaton_stereotype_parsed():
    text = ("component C { <<timed>> automaton Machine {"
            " state S; initial S; } }")
    unit = parse_component_file(text, "a")
    assert isinstance(unit, CompilationUnit)
    auto = unit.component.automata[0]
    assert auto.stereotypes == ["timed"]
    assert auto.name == "Machine"


def test_guillemet_stereotype_equivalent():
    a = parse_component_file("component C { automaton { state <<error>> T; initial T; } }", "a")
    b = parse_component_file("component C { automaton { state «error» T; initial T; } }", "b")
    assert isinstance(a, CompilationUnit) and isinstance(b, CompilationUnit)
    assert a == b


def test_guard_kinds():
    unit = parse_model(MODELS / "reference" / "SmallNumbersBuffer.maa")
    transitions = unit.component.automata[0].transitions
    assert transitions[0].guard.kind is None
    assert transitions[1].guard.kind == "java"
    text = "component C { automaton { state S; initial S; S [ocl: x > 1]; } }"
    unit2 = parse_component_file(text, "g")
    assert isinstance(unit2, CompilationUnit)
    assert unit2.component.automata[0].transitions[0].guard.kind == "ocl"


def test_omitted_target_is_source():
    unit = parse_model(MODELS / "robot" / "FollowTheLeaderOnline.maa")
    transitions = unit.component.automata[0].transitions
    assert (transitions[0].source, transitions[0].target) == ("Following", "Following")
    assert (transitions[2].source, transitions[2].target) == ("Following", "Finding")


def test_value_shapes():
    text = """component C {
        port in Integer p, out Integer q;
        Integer v = -1;
        automaton {
            state S; initial S;
            S p = 0 | 1 | -- / q = [2, 3] | -4 | --;
        }
    }"""
    unit = parse_component_file(text, "v")
    assert isinstance(unit, CompilationUnit)
    assert unit.component.variables[0].initial == IntLit(-1, None)
    trans = unit.component.automata[0].transitions[0]
    assert trans.input[0].alternatives == [IntLit(0, None), IntLit(1, None), NoData(None)]
    seq, neg, nodata = trans.output[0].alternatives
    assert seq == SequenceValue([IntLit(2, None), IntLit(3, None)], None)
    assert neg == IntLit(-4, None)
    assert isinstance(nodata, NoData)


def test_string_escapes():
    unit = parse_component_file(
        r'component C { String s = "a\"b\\c"; }', "s")
    assert isinstance(unit, CompilationUnit)
    assert unit.component.variables[0].initial == StringLit('a"b\\c', None)


def test_unclosed_brace_reports_syn_at_end():
    result = parse_component_file("component X {", "x.maa")
    assert isinstance(result, list) and len(result) == 1
    diag = result[0]
    assert diag.code == "SYN"
    assert diag.loc.line == 1


def test_two_top_level_components_rejected():
    result = parse_component_file("component A { }\ncomponent B { }", "two.maa")
    assert isinstance(result, list)
    assert result[0].code == "SYN"
    assert result[0].loc.line == 2
    assert "one top-level component" in result[0].message


def test_syntax_error_location():
    result = parse_component_file("component C {\n  port in Integer ,;\n}", "loc.maa")
    assert isinstance(result, list)
    assert (result[0].loc.line, result[0].code) == (2, "SYN")


def test_automaton_statement_order_free():
    base = """component C {
        port in Boolean p;
        automaton {
            state A, B;
            initial A;
            A -> B true;
            B -> A false;
        }
    }"""
    shuffled = """component C {
        port in Boolean p;
        automaton {
            A -> B true;
            initial A;
            state A, B;
            B -> A false;
        }
    }"""
    u1 = parse_component_file(base, "a")
    u2 = parse_component_file(shuffled, "b")
    assert isinstance(u1, CompilationUnit) and isinstance(u2, CompilationUnit)
    a1, a2 = u1.component.automata[0], u2.component.automata[0]
    assert a1.states == a2.states
    assert a1.initials == a2.initials
    assert a1.transitions == a2.transitions


def test_types_file_round():
    text = ("package bumperbot.types; "
            "enum MotorCmd { FORWARD, BACKWARD, STOP } "
            "enum TimerCmd { SINGLE_DELAY, DOUBLE_DELAY }")
    unit = parse_types_file(text, "t.types")
    assert isinstance(unit, TypeDeclUnit)
    assert [e.name for e in unit.enums] == ["MotorCmd", "TimerCmd"]
    assert unit.enums[0].literals == ["FORWARD", "BACKWARD", "STOP"]


def test_types_empty_enum_accepted():
    unit = parse_types_file("package p; enum E { }", "t")
    assert isinstance(unit, TypeDeclUnit)
    assert unit.enums[0].literals == []


def test_types_duplicate_literal_rejected():
    result = parse_types_file("package p; enum E { A, A }", "t")
    assert isinstance(result, list) and len(result) == 1
    assert result[0].code == "SYN"


def test_types_duplicate_enum_rejected():
    result = parse_types_file("package p; enum E { A } enum E { B }", "t")
    assert isinstance(result, list)
    assert result[0].code == "SYN"


def test_comments_both_styles():
    text = """// leading comment
    component C { /* block
    spanning lines */ port in Integer p; // trailing
    }"""
    unit = parse_component_file(text, "c")
    assert isinstance(unit, CompilationUnit)


def test_subcomponents_and_connectors():
    unit = parse_model(MODELS / "pipeline" / "Pipeline.maa")
    comp = unit.component
    assert [s.instance for s in comp.subcomponents] == ["src", "arb", "snk"]
    assert comp.subcomponents[1].type_args == ["Integer"]
    assert len(comp.connectors) == 5
    first = comp.connectors[0]
    assert (first.source.instance, first.source.port) == (None, "mode")
    assert (first.target.instance, first.target.port) == ("arb", "mode")
