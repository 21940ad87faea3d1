"""Execution engines for checked models.

Time-synchronous runs proceed in global cycles: every atomic instance fires at
most one enabled transition per cycle (or completes idle), and anything it
emits becomes visible to its communication partners, and externally, exactly
one cycle later.  Initial outputs are what the outside world observes in cycle
one.  Unread messages are lost at the end of their cycle.

Event-driven runs consume one scripted event at a time, run-to-completion: the
matching transition may emit finite sequences of events per output port.

Nondeterminism (several enabled transitions, ``|`` alternatives, several
initial states) is resolved by a :class:`Policy`; ``enumerate_ts`` instead
expands every choice point and returns the exact reachable trace set, serving
as a brute-force oracle for the policy-driven engines.
"""

from __future__ import annotations

import itertools
import random
from dataclasses import dataclass, field
from typing import Optional, Union

from .resolution import (
    BOOLEAN,
    EnumType,
    INTEGER,
    ResolvedComponent,
    ResolvedModel,
    STRING,
    TypeRef,
    substitute_type,
)
from .syntax import (
    Assignment,
    Automaton,
    BoolLit,
    EBinary,
    ELit,
    ERef,
    EUnary,
    Expr,
    IntLit,
    Match,
    NameValue,
    NoData,
    SequenceValue,
    StringLit,
    Transition,
    ValueTerm,
)


class SimulationError(Exception):
    """Runtime failure during a simulation (e.g. forwarding an absent message)."""

    def __init__(self, message: str, cycle: Optional[int] = None):
        super().__init__(message if cycle is None else f"cycle {cycle}: {message}")
        self.message = message
        self.cycle = cycle


class SetupError(Exception):
    """Bad simulation request: unknown component, port, or malformed stimulus."""


class EnumerationOverflow(Exception):
    """Raised when exhaustive enumeration exceeds its trace bound."""


# ---------------------------------------------------------------------------
# Runtime values
# ---------------------------------------------------------------------------

class _Absent:
    _singleton = None

    def __new__(cls):
        if cls._singleton is None:
            cls._singleton = super().__new__(cls)
        return cls._singleton

    def __repr__(self) -> str:
        return "--"


ABSENT = _Absent()


@dataclass(frozen=True)
class EnumValue:
    enum: str  # qualified enum name
    literal: str

    def __str__(self) -> str:
        return self.literal


Value = Union[int, bool, str, EnumValue]
Slot = Union[Value, _Absent]


def values_equal(a: Slot, b: Slot) -> bool:
    """Exact equality; bool and int never compare equal across types."""
    if a is ABSENT or b is ABSENT:
        return a is b
    if type(a) is not type(b):
        return False
    return a == b


def format_value(value: Slot) -> str:
    """Serialized form: enum literals bare, strings quoted, absence as --."""
    if value is ABSENT:
        return "--"
    if isinstance(value, EnumValue):
        return value.literal
    if isinstance(value, bool):
        return "true" if value else "false"
    if isinstance(value, str):
        escaped = value.replace("\\", "\\\\").replace('"', '\\"')
        return f'"{escaped}"'
    return str(value)


# ---------------------------------------------------------------------------
# Policies
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class FirstDeclared:
    """Always take the first option in declaration order."""


@dataclass(frozen=True)
class Seeded:
    """Uniform choice at every decision point, driven by one seeded generator."""

    seed: int


@dataclass(frozen=True)
class Exhaustive:
    """Marker policy: expand all choices (only valid with enumerate_ts)."""

    bound: int = 1024


Policy = Union[FirstDeclared, Seeded, Exhaustive]


class _Chooser:
    def __init__(self, policy: Policy):
        if isinstance(policy, Exhaustive):
            raise SetupError("the exhaustive policy is only usable via enumerate_ts")
        self._rng = random.Random(policy.seed) if isinstance(policy, Seeded) else None

    def pick(self, options: list):
        if not options:
            raise IndexError("no options to choose from")
        if self._rng is None or len(options) == 1:
            return options[0]
        return options[self._rng.randrange(len(options))]


# ---------------------------------------------------------------------------
# States and traces
# ---------------------------------------------------------------------------

@dataclass
class ComponentState:
    state: Optional[str]  # None for an automaton-less instance
    variables: dict[str, Value] = field(default_factory=dict)

    def copy(self) -> "ComponentState":
        return ComponentState(self.state, dict(self.variables))

    def freeze(self) -> tuple:
        return (self.state, tuple(sorted(self.variables.items(), key=lambda kv: kv[0])))


@dataclass
class CycleRecord:
    index: int
    inputs: dict[str, Slot]
    outputs: dict[str, Slot]
    states: dict[str, ComponentState]  # instance path -> post-cycle state

    def freeze(self) -> tuple:
        return (
            self.index,
            tuple(sorted((k, _freeze_slot(v)) for k, v in self.inputs.items())),
            tuple(sorted((k, _freeze_slot(v)) for k, v in self.outputs.items())),
            tuple(sorted((k, s.freeze()) for k, s in self.states.items())),
        )


def _freeze_slot(v: Slot):
    return "--" if v is ABSENT else (type(v).__name__, str(v))


@dataclass
class Trace:
    records: list[CycleRecord]

    def key(self) -> tuple:
        return tuple(r.freeze() for r in self.records)

    def out_column(self, port: str) -> list[Slot]:
        return [r.outputs[port] for r in self.records]


@dataclass(frozen=True)
class Event:
    port: str
    value: Value


@dataclass
class EventStep:
    event: Event
    emissions: list[tuple[str, list[Value]]]
    state: ComponentState


@dataclass
class EventTrace:
    initial_state: Optional[str]
    initial_emissions: list[tuple[str, list[Value]]]
    steps: list[EventStep]


# ---------------------------------------------------------------------------
# Term evaluation
# ---------------------------------------------------------------------------

def _term_value(term: ValueTerm, inputs: dict[str, Slot], variables: dict[str, Value]) -> Slot:
    """Value denoted by a single (non-sequence) term in the current context."""
    if isinstance(term, IntLit):
        return term.value
    if isinstance(term, BoolLit):
        return term.value
    if isinstance(term, StringLit):
        return term.value
    if isinstance(term, NoData):
        return ABSENT
    if isinstance(term, NameValue):
        binding = term.binding
        if binding is not None and binding[0] == "enum":
            return EnumValue(binding[1].qname, term.name)
        if term.name in inputs:
            return inputs[term.name]
        if term.name in variables:
            return variables[term.name]
        raise SimulationError(f"unresolved name '{term.name}' at runtime")
    raise SimulationError(f"cannot evaluate {term!r} as a single value")


def eval_guard(guard: Expr, inputs: dict[str, Slot], variables: dict[str, Value]) -> bool:
    """Evaluate a guard; any reference to an absent port makes it false."""
    for ref in _expr_refs(guard):
        if ref.name in inputs and inputs[ref.name] is ABSENT:
            return False
    result = _eval_expr(guard, inputs, variables)
    if not isinstance(result, bool):
        raise SimulationError("guard did not evaluate to a Boolean")
    return result


def _eval_expr(expr: Expr, inputs, variables):
    if isinstance(expr, ELit):
        return expr.value
    if isinstance(expr, ERef):
        binding = expr.binding
        if binding is not None and binding[0] == "enum":
            return EnumValue(binding[1].qname, expr.name)
        if expr.name in inputs:
            return inputs[expr.name]
        if expr.name in variables:
            return variables[expr.name]
        raise SimulationError(f"unresolved name '{expr.name}' in guard")
    if isinstance(expr, EUnary):
        v = _eval_expr(expr.operand, inputs, variables)
        return (not v) if expr.op == "!" else -v
    if isinstance(expr, EBinary):
        left = _eval_expr(expr.left, inputs, variables)
        if expr.op == "&&":
            return bool(left) and bool(_eval_expr(expr.right, inputs, variables))
        if expr.op == "||":
            return bool(left) or bool(_eval_expr(expr.right, inputs, variables))
        right = _eval_expr(expr.right, inputs, variables)
        if expr.op == "==":
            return values_equal(left, right)
        if expr.op == "!=":
            return not values_equal(left, right)
        if expr.op == "<":
            return left < right
        if expr.op == "<=":
            return left <= right
        if expr.op == ">":
            return left > right
        if expr.op == ">=":
            return left >= right
        if expr.op == "+":
            return left + right
        if expr.op == "-":
            return left - right
        if expr.op == "*":
            return left * right
    raise SimulationError(f"cannot evaluate expression {expr!r}")


def _expr_refs(expr: Expr):
    if isinstance(expr, ERef):
        if expr.binding is None or expr.binding[0] != "enum":
            yield expr
    elif isinstance(expr, EUnary):
        yield from _expr_refs(expr.operand)
    elif isinstance(expr, EBinary):
        yield from _expr_refs(expr.left)
        yield from _expr_refs(expr.right)


# ---------------------------------------------------------------------------
# Transition matching and firing
# ---------------------------------------------------------------------------

def match_input(t: Transition, inputs: dict[str, Slot], variables: dict[str, Value]) -> bool:
    """Whether every entry of the transition's input block is satisfied.

    Omitted ports and variables impose no constraint.  An absent port satisfies
    only the ``--`` alternative.
    """
    for match in t.input or []:
        if not _match_satisfied(match, inputs, variables):
            return False
    return True


def _match_satisfied(match: Match, inputs, variables) -> bool:
    target = match.resolved_target
    if target is None:
        raise SimulationError(f"input target could not be resolved at {match.loc}")
    if target in inputs:
        current = inputs[target]
    elif target in variables:
        current = variables[target]
    else:
        raise SimulationError(f"no runtime value for '{target}'")
    for alt in match.alternatives:
        if isinstance(alt, SequenceValue):
            continue  # a sequence never matches a single message
        if values_equal(current, _term_value(alt, inputs, variables)):
            return True
    return False


def enabled(automaton: Automaton, state: ComponentState,
            inputs: dict[str, Slot]) -> list[Transition]:
    """Enabled transitions in declaration order."""
    result = []
    for t in automaton.transitions:
        if t.source != state.state:
            continue
        if t.guard is not None and not eval_guard(t.guard.expr, inputs, state.variables):
            continue
        if not match_input(t, inputs, state.variables):
            continue
        result.append(t)
    return result


def _assignment_choices(assigns: list[Assignment]) -> list[list[ValueTerm]]:
    """All alternative selections, as one list of picked terms per combination."""
    pools = [a.alternatives for a in assigns]
    return [list(combo) for combo in itertools.product(*pools)]


def _apply_output(assigns: list[Assignment], picks: list[ValueTerm],
                  inputs: dict[str, Slot], variables: dict[str, Value],
                  port_dir: dict[str, str]):
    """Evaluate one selection of alternatives; returns (port outputs, new vars).

    Port outputs map to a value, ABSENT, or a list (sequence); variables not
    assigned keep their values; all right-hand sides read the pre-state.
    """
    outputs: dict[str, object] = {}
    new_vars = dict(variables)
    for assign, pick in zip(assigns, picks):
        target = assign.resolved_target
        if target is None:
            raise SimulationError(f"output target could not be resolved at {assign.loc}")
        if isinstance(pick, SequenceValue):
            value: object = [_forwarded(e, inputs, variables) for e in pick.elements]
        else:
            value = _term_value(pick, inputs, variables)
            if isinstance(pick, NameValue) and value is ABSENT:
                raise SimulationError(
                    f"forwarding absent message from port '{pick.name}'")
        if port_dir.get(target) is not None:
            outputs[target] = value
        else:
            if value is ABSENT or isinstance(value, list):
                raise SimulationError(
                    f"variable '{target}' cannot take an absent value or sequence")
            new_vars[target] = value
    return outputs, new_vars


def _forwarded(term: ValueTerm, inputs, variables) -> Value:
    value = _term_value(term, inputs, variables)
    if value is ABSENT:
        name = term.name if isinstance(term, NameValue) else "--"
        raise SimulationError(f"forwarding absent message from port '{name}'")
    return value


def fire(t: Transition, inputs: dict[str, Slot], variables: dict[str, Value],
         policy: Policy, rng: Optional[_Chooser] = None,
         out_ports: Optional[list[str]] = None,
         port_dir: Optional[dict[str, str]] = None):
    """Execute one enabled transition; returns (port outputs, new variables).

    Each assignment selects one alternative per policy.  When ``out_ports`` is
    given, unassigned ports are filled with ABSENT.
    """
    chooser = rng or _Chooser(policy)
    assigns = t.output or []
    picks = [chooser.pick(a.alternatives) for a in assigns]
    if port_dir is None:
        # standalone use: anything that is not a known variable is a port
        port_dir = {a.resolved_target: "out" for a in assigns
                    if a.resolved_target is not None
                    and a.resolved_target not in variables}
    outputs, new_vars = _apply_output(assigns, picks, inputs, variables, port_dir)
    if out_ports is not None:
        for port in out_ports:
            outputs.setdefault(port, ABSENT)
    return outputs, new_vars


# ---------------------------------------------------------------------------
# Instantiation (composition flattening)
# ---------------------------------------------------------------------------

@dataclass
class AtomicInstance:
    path: str  # "" for an atomic main component
    rc: ResolvedComponent
    subst: dict[str, TypeRef]
    automaton: Optional[Automaton]
    in_sources: dict[str, tuple] = field(default_factory=dict)

    @property
    def label(self) -> str:
        return self.path or self.rc.ast.name


@dataclass
class SystemPlan:
    model: ResolvedModel
    main: ResolvedComponent
    instances: list[AtomicInstance]
    out_sources: dict[str, tuple]

    def instance(self, path: str) -> AtomicInstance:
        for inst in self.instances:
            if inst.path == path:
                return inst
        raise KeyError(path)


def build_plan(model: ResolvedModel, main: str) -> SystemPlan:
    """Flatten the (possibly hierarchical) main component to atomic instances."""
    if main not in model.components:
        raise SetupError(f"unknown main component '{main}'")
    root = model.components[main]

    instances: list[AtomicInstance] = []
    edges: dict[tuple[str, str], tuple[str, str]] = {}
    atomic_paths: set[str] = set()

    def expand(rc: ResolvedComponent, path: str, subst: dict[str, TypeRef]):
        if not rc.ast.subcomponents:
            if len(rc.ast.automata) > 1:
                raise SetupError(
                    f"component '{rc.qname}' has several automata; "
                    "simulation needs at most one")
            automaton = rc.ast.automata[0] if rc.ast.automata else None
            instances.append(AtomicInstance(path, rc, subst, automaton))
            atomic_paths.add(path)
            return
        if rc.ast.automata:
            raise SetupError(
                f"component '{rc.qname}' mixes subcomponents and automaton behavior")
        for decl in rc.ast.subcomponents:
            sub = rc.subcomponents.get(decl.instance)
            if sub is None:
                raise SetupError(
                    f"subcomponent '{decl.instance}' of '{rc.qname}' did not resolve")
            child_rc = model.components[sub.target_qname]
            child_path = f"{path}.{decl.instance}" if path else decl.instance
            child_subst = {
                param: substitute_type(arg, subst)
                for param, arg in zip(child_rc.ast.generic_params, sub.arg_types)
            }
            expand(child_rc, child_path, child_subst)
        for conn in rc.ast.connectors:
            src = _node(path, conn.source)
            dst = _node(path, conn.target)
            edges[dst] = src

    def _node(path: str, ref) -> tuple[str, str]:
        if ref.instance is None:
            return (path, ref.port)
        inner = f"{path}.{ref.instance}" if path else ref.instance
        return (inner, ref.port)

    expand(root, "", {})

    def follow(node: tuple[str, str], seen: set) -> tuple:
        if node in seen:
            raise SetupError(f"connector cycle through {node[1]!r}")
        seen = seen | {node}
        path, port = node
        if path in atomic_paths and node not in edges:
            inst = next(i for i in instances if i.path == path)
            if inst.rc.port_dir.get(port) == "out":
                return ("inst", path, port)
        if path == "" and root.port_dir.get(port) == "in" and root.ast.subcomponents:
            return ("ext", port)
        if node in edges:
            return follow(edges[node], seen)
        return ("absent",)

    is_composed = bool(root.ast.subcomponents)
    for inst in instances:
        for port in inst.rc.in_ports:
            if not is_composed:
                inst.in_sources[port] = ("ext", port)
            else:
                inst.in_sources[port] = follow((inst.path, port), set())

    out_sources: dict[str, tuple] = {}
    for port in root.out_ports:
        if not is_composed:
            out_sources[port] = ("inst", "", port)
        else:
            out_sources[port] = follow(("", port), set())

    return SystemPlan(model, root, instances, out_sources)


def default_value(ref: Optional[TypeRef], subst: dict[str, TypeRef],
                  model: ResolvedModel) -> Value:
    """Type default for a variable read before any assignment."""
    ref = substitute_type(ref, subst)
    if ref == INTEGER:
        return 0
    if ref == BOOLEAN:
        return False
    if ref == STRING:
        return ""
    if isinstance(ref, EnumType):
        enum = model.enums.get(ref.qname)
        if enum is None or not enum.literals:
            raise SetupError(f"enum '{ref.qname}' has no literals to default to")
        return EnumValue(ref.qname, enum.literals[0])
    raise SetupError(f"cannot default a value of type {ref}")


# ---------------------------------------------------------------------------
# Time-synchronous engine
# ---------------------------------------------------------------------------

@dataclass
class TSState:
    components: dict[str, ComponentState]
    pending: dict[str, dict[str, Slot]]

    def copy(self) -> "TSState":
        return TSState(
            {k: v.copy() for k, v in self.components.items()},
            {k: dict(v) for k, v in self.pending.items()},
        )


def _initial_component_state(inst: AtomicInstance, model: ResolvedModel,
                             initial, picks) -> tuple[ComponentState, dict[str, Slot]]:
    """State and pending outputs after processing one chosen initial entry."""
    variables: dict[str, Value] = {}
    for var in inst.rc.ast.variables:
        declared = inst.rc.var_type.get(var.name)
        if var.initial is not None:
            value = _term_value(var.initial, {}, variables)
            if value is ABSENT:
                raise SimulationError(f"variable '{var.name}' initialized to an absent value")
            variables[var.name] = value
        else:
            variables[var.name] = default_value(declared, inst.subst, model)

    pending = {port: ABSENT for port in inst.rc.out_ports}
    if inst.automaton is None:
        return ComponentState(None, variables), pending

    if initial is None:
        # no initial declaration (a convention warning): start at the first
        # declared state with no initial output
        start = inst.automaton.states[0].name if inst.automaton.states else None
        return ComponentState(start, variables), pending

    state = ComponentState(initial.state, variables)
    assigns = initial.output or []
    inputs = {port: ABSENT for port in inst.rc.in_ports}
    outputs, new_vars = _apply_output(assigns, picks, inputs, variables, inst.rc.port_dir)
    for port, value in outputs.items():
        if isinstance(value, list):
            raise SimulationError(
                f"initial output on port '{port}' is a sequence; "
                "the time-synchronous profile allows one message per port")
        pending[port] = value
    state.variables = new_vars
    return state, pending


def _init_ts(plan: SystemPlan, chooser: _Chooser) -> TSState:
    components: dict[str, ComponentState] = {}
    pending: dict[str, dict[str, Slot]] = {}
    for inst in plan.instances:
        initial = None
        if inst.automaton is not None and inst.automaton.initials:
            initial = chooser.pick(inst.automaton.initials)
        picks = [chooser.pick(a.alternatives) for a in (initial.output or [])] if initial else []
        state, pend = _initial_component_state(inst, plan.model, initial, picks)
        components[inst.path] = state
        pending[inst.path] = pend
    return TSState(components, pending)


def _instance_inputs(plan: SystemPlan, state: TSState, inst: AtomicInstance,
                     external: dict[str, Slot]) -> dict[str, Slot]:
    inputs: dict[str, Slot] = {}
    for port in inst.rc.in_ports:
        source = inst.in_sources[port]
        if source[0] == "ext":
            inputs[port] = external.get(source[1], ABSENT)
        elif source[0] == "inst":
            inputs[port] = state.pending[source[1]].get(source[2], ABSENT)
        else:
            inputs[port] = ABSENT
    return inputs


def _observe(plan: SystemPlan, state: TSState, external: dict[str, Slot]) -> dict[str, Slot]:
    observed: dict[str, Slot] = {}
    for port, source in plan.out_sources.items():
        if source[0] == "inst":
            observed[port] = state.pending[source[1]].get(source[2], ABSENT)
        elif source[0] == "ext":
            observed[port] = external.get(source[1], ABSENT)
        else:
            observed[port] = ABSENT
    return observed


def step_ts(plan: SystemPlan, state: TSState, external: dict[str, Slot],
            policy: Policy, chooser: Optional[_Chooser] = None,
            cycle: Optional[int] = None) -> tuple[TSState, dict[str, Slot]]:
    """One global cycle; returns the successor state and the observed outputs."""
    chooser = chooser or _Chooser(policy)
    observed = _observe(plan, state, external)
    new_components: dict[str, ComponentState] = {}
    new_pending: dict[str, dict[str, Slot]] = {}
    for inst in plan.instances:
        cs = state.components[inst.path]
        inputs = _instance_inputs(plan, state, inst, external)
        blank = {port: ABSENT for port in inst.rc.out_ports}
        if inst.automaton is None:
            new_components[inst.path] = cs.copy()
            new_pending[inst.path] = blank
            continue
        options = enabled(inst.automaton, cs, inputs)
        if not options:
            # idle completion: state and variables unchanged, nothing emitted
            new_components[inst.path] = cs.copy()
            new_pending[inst.path] = blank
            continue
        transition = chooser.pick(options)
        try:
            outputs, new_vars = fire(transition, inputs, cs.variables, policy,
                                     rng=chooser, port_dir=inst.rc.port_dir)
        except SimulationError as exc:
            raise SimulationError(exc.message, cycle) from None
        for port, value in outputs.items():
            if isinstance(value, list):
                raise SimulationError(
                    f"transition emitted a sequence on port '{port}'; the "
                    "time-synchronous profile allows one message per port", cycle)
            blank[port] = value
        new_components[inst.path] = ComponentState(transition.target, new_vars)
        new_pending[inst.path] = blank
    return TSState(new_components, new_pending), observed


def _normalize_stimulus(plan: SystemPlan, stimulus: list[dict[str, Slot]],
                        n_cycles: int) -> list[dict[str, Slot]]:
    in_ports = plan.main.in_ports
    rows: list[dict[str, Slot]] = []
    for row in stimulus:
        for port in row:
            if port not in in_ports:
                raise SetupError(f"stimulus column '{port}' is not an in-port of "
                                 f"'{plan.main.qname}'")
        rows.append({port: row.get(port, ABSENT) for port in in_ports})
    while len(rows) < n_cycles:
        rows.append({port: ABSENT for port in in_ports})
    return rows[:n_cycles]


def run_ts(model: ResolvedModel, main: str, stimulus: list[dict[str, Slot]],
           n_cycles: int, policy: Policy = FirstDeclared()) -> Trace:
    """Run the time-synchronous engine for a fixed number of cycles."""
    if n_cycles < 1:
        raise SetupError("a run needs at least one cycle")
    plan = build_plan(model, main)
    rows = _normalize_stimulus(plan, stimulus, n_cycles)
    chooser = _Chooser(policy)
    state = _init_ts(plan, chooser)
    records: list[CycleRecord] = []
    for index in range(1, n_cycles + 1):
        external = rows[index - 1]
        state, observed = step_ts(plan, state, external, policy, chooser, cycle=index)
        records.append(CycleRecord(
            index, dict(external), observed,
            {inst.path: state.components[inst.path].copy() for inst in plan.instances},
        ))
    return Trace(records)


# ---------------------------------------------------------------------------
# Exhaustive enumeration (oracle)
# ---------------------------------------------------------------------------

def enumerate_ts(model: ResolvedModel, main: str, stimulus: list[dict[str, Slot]],
                 n_cycles: int, bound: int = 1024) -> list[Trace]:
    """Every trace reachable by some resolution of all choice points.

    Deduplicated; raises :class:`EnumerationOverflow` when more than ``bound``
    distinct traces would be produced.
    """
    if n_cycles < 1:
        raise SetupError("a run needs at least one cycle")
    if bound < 1:
        raise SetupError("the enumeration bound must be at least 1")
    plan = build_plan(model, main)
    rows = _normalize_stimulus(plan, stimulus, n_cycles)

    results: dict[tuple, Trace] = {}

    def add(trace: Trace):
        key = trace.key()
        if key not in results:
            if len(results) >= bound:
                raise EnumerationOverflow(
                    f"more than {bound} distinct traces; raise the bound")
            results[key] = trace

    def initial_states() -> list[TSState]:
        per_instance: list[list[tuple[ComponentState, dict[str, Slot]]]] = []
        for inst in plan.instances:
            options: list[tuple[ComponentState, dict[str, Slot]]] = []
            if inst.automaton is not None and inst.automaton.initials:
                for initial in inst.automaton.initials:
                    for picks in _assignment_choices(initial.output or []):
                        options.append(
                            _initial_component_state(inst, plan.model, initial, picks))
            else:
                options.append(_initial_component_state(inst, plan.model, None, []))
            per_instance.append(options)
        states = []
        for combo in itertools.product(*per_instance):
            states.append(TSState(
                {inst.path: cs.copy() for inst, (cs, _) in zip(plan.instances, combo)},
                {inst.path: dict(pend) for inst, (_, pend) in zip(plan.instances, combo)},
            ))
        return states

    def instance_successors(inst: AtomicInstance, cs: ComponentState,
                            inputs: dict[str, Slot], cycle: int):
        blank = {port: ABSENT for port in inst.rc.out_ports}
        if inst.automaton is None:
            return [(cs.copy(), blank)]
        options = enabled(inst.automaton, cs, inputs)
        if not options:
            return [(cs.copy(), blank)]
        successors = []
        for transition in options:
            assigns = transition.output or []
            for picks in _assignment_choices(assigns):
                try:
                    outputs, new_vars = _apply_output(
                        assigns, picks, inputs, cs.variables, inst.rc.port_dir)
                except SimulationError as exc:
                    raise SimulationError(exc.message, cycle) from None
                pend = dict(blank)
                for port, value in outputs.items():
                    if isinstance(value, list):
                        raise SimulationError(
                            f"transition emitted a sequence on port '{port}'", cycle)
                    pend[port] = value
                successors.append((ComponentState(transition.target, new_vars), pend))
        return successors

    def explore(state: TSState, index: int, prefix: list[CycleRecord]):
        if index > n_cycles:
            add(Trace([CycleRecord(r.index, dict(r.inputs), dict(r.outputs),
                                   {k: v.copy() for k, v in r.states.items()})
                       for r in prefix]))
            return
        external = rows[index - 1]
        observed = _observe(plan, state, external)
        per_instance = []
        for inst in plan.instances:
            inputs = _instance_inputs(plan, state, inst, external)
            per_instance.append(instance_successors(
                inst, state.components[inst.path], inputs, index))
        for combo in itertools.product(*per_instance):
            next_state = TSState(
                {inst.path: cs for inst, (cs, _) in zip(plan.instances, combo)},
                {inst.path: pend for inst, (_, pend) in zip(plan.instances, combo)},
            )
            record = CycleRecord(
                index, dict(external), dict(observed),
                {inst.path: cs.copy() for inst, (cs, _) in zip(plan.instances, combo)},
            )
            explore(next_state, index + 1, prefix + [record])

    for start in initial_states():
        explore(start, 1, [])

    return sorted(results.values(), key=Trace.key)


# ---------------------------------------------------------------------------
# Event-driven engine
# ---------------------------------------------------------------------------

def _transition_read_ports(rc: ResolvedComponent, t: Transition) -> set[str]:
    ports: set[str] = set()
    if t.guard is not None:
        for ref in _expr_refs(t.guard.expr):
            if rc.port_dir.get(ref.name) == "in":
                ports.add(ref.name)
    for match in t.input or []:
        target = match.resolved_target
        if target is not None and rc.port_dir.get(target) == "in":
            ports.add(target)
    return ports


def _ed_matches(rc: ResolvedComponent, t: Transition, cs: ComponentState,
                event: Event) -> bool:
    if t.source != cs.state:
        return False
    if _transition_read_ports(rc, t) != {event.port}:
        return False
    inputs = {port: ABSENT for port in rc.in_ports}
    inputs[event.port] = event.value
    if t.guard is not None and not eval_guard(t.guard.expr, inputs, cs.variables):
        return False
    return match_input(t, inputs, cs.variables)


def _ed_emissions(rc: ResolvedComponent, t: Transition, cs: ComponentState,
                  event: Event, chooser: _Chooser):
    inputs = {port: ABSENT for port in rc.in_ports}
    inputs[event.port] = event.value
    emissions: list[tuple[str, list[Value]]] = []
    new_vars = dict(cs.variables)
    for assign in t.output or []:
        target = assign.resolved_target
        if target is None:
            raise SimulationError(f"output target could not be resolved at {assign.loc}")
        pick = chooser.pick(assign.alternatives)
        if rc.port_dir.get(target) == "out":
            if isinstance(pick, SequenceValue):
                values = [_forwarded(e, inputs, cs.variables) for e in pick.elements]
            elif isinstance(pick, NoData):
                values = []
            else:
                values = [_forwarded(pick, inputs, cs.variables)]
            emissions.append((target, values))
        else:
            value = _term_value(pick, inputs, cs.variables)
            if value is ABSENT or isinstance(pick, SequenceValue):
                raise SimulationError(
                    f"variable '{target}' cannot take an absent value or sequence")
            new_vars[target] = value
    return emissions, new_vars


class EventMachine:
    """Event-driven interpreter for one atomic component."""

    def __init__(self, model: ResolvedModel, main: str, policy: Policy = FirstDeclared()):
        if main not in model.components:
            raise SetupError(f"unknown main component '{main}'")
        rc = model.components[main]
        if rc.ast.subcomponents:
            raise SetupError("event-driven simulation requires an atomic main component")
        if len(rc.ast.automata) > 1:
            raise SetupError(f"component '{rc.qname}' has several automata")
        self.model = model
        self.rc = rc
        self.automaton = rc.ast.automata[0] if rc.ast.automata else None
        self.policy = policy
        self.chooser = _Chooser(policy)

    def initial(self) -> tuple[ComponentState, list[tuple[str, list[Value]]]]:
        variables: dict[str, Value] = {}
        for var in self.rc.ast.variables:
            if var.initial is not None:
                variables[var.name] = _term_value(var.initial, {}, variables)
            else:
                variables[var.name] = default_value(
                    self.rc.var_type.get(var.name), {}, self.model)
        if self.automaton is None:
            return ComponentState(None, variables), []
        if not self.automaton.initials:
            start = self.automaton.states[0].name if self.automaton.states else None
            return ComponentState(start, variables), []
        initial = self.chooser.pick(self.automaton.initials)
        cs = ComponentState(initial.state, variables)
        emissions: list[tuple[str, list[Value]]] = []
        inputs = {port: ABSENT for port in self.rc.in_ports}
        for assign in initial.output or []:
            target = assign.resolved_target
            if target is None:
                raise SimulationError(f"output target could not be resolved at {assign.loc}")
            pick = self.chooser.pick(assign.alternatives)
            if self.rc.port_dir.get(target) == "out":
                if isinstance(pick, SequenceValue):
                    values = [_forwarded(e, inputs, variables) for e in pick.elements]
                elif isinstance(pick, NoData):
                    values = []
                else:
                    values = [_forwarded(pick, inputs, variables)]
                emissions.append((target, values))
            else:
                cs.variables[target] = _term_value(pick, inputs, variables)
        return cs, emissions

    def step(self, cs: ComponentState, event: Event) -> tuple[ComponentState, list]:
        """Consume one event; unmatched events are dropped without effect."""
        if event.port not in self.rc.in_ports:
            raise SetupError(f"'{event.port}' is not an in-port of '{self.rc.qname}'")
        if self.automaton is None:
            return cs.copy(), []
        options = [t for t in self.automaton.transitions
                   if _ed_matches(self.rc, t, cs, event)]
        if not options:
            return cs.copy(), []
        transition = self.chooser.pick(options)
        emissions, new_vars = _ed_emissions(self.rc, transition, cs, event, self.chooser)
        return ComponentState(transition.target, new_vars), emissions


def step_ed(machine: EventMachine, cs: ComponentState, event: Event):
    """One event-driven step; see :meth:`EventMachine.step`."""
    return machine.step(cs, event)


def run_ed(model: ResolvedModel, main: str, script: list[Event],
           policy: Policy = FirstDeclared()) -> EventTrace:
    """Consume the scripted events in order, run-to-completion per event."""
    machine = EventMachine(model, main, policy)
    cs, initial_emissions = machine.initial()
    trace = EventTrace(cs.state, initial_emissions, [])
    for event in script:
        cs, emissions = machine.step(cs, event)
        trace.steps.append(EventStep(event, emissions, cs.copy()))
    return trace
