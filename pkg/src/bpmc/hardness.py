"""Instance generators from monotone circuits and linear-bounded alternating TMs."""

from __future__ import annotations

import re
from dataclasses import dataclass
from fractions import Fraction
from typing import Sequence

from .automata import Dpa, Nba
from .bp import IDENT, BranchingProcess, _statements, make_bp
from .errors import CyclicCircuit, EmptyWord, ParseError, ValidationError

# -- monotone circuits -------------------------------------------------------


@dataclass(frozen=True)
class MonotoneCircuit:
    gates: dict[str, tuple[str, tuple[str, ...]]]  # name -> ("AND" | "OR", children)
    inputs: dict[str, int]
    output: str

    def __post_init__(self):
        for g, (op, kids) in self.gates.items():
            if op not in ("AND", "OR"):
                raise ValueError(f"gate {g}: unknown operator {op!r}")
            if not kids:
                raise ValueError(f"gate {g} has no inputs")
            for c in kids:
                if c not in self.gates and c not in self.inputs:
                    raise ValueError(f"gate {g}: unknown input {c!r}")
        if self.output not in self.gates and self.output not in self.inputs:
            raise ValueError(f"unknown output {self.output!r}")
        self.topological_order()

    def topological_order(self) -> list[str]:
        """Gates, children before parents.  Raises CyclicCircuit."""
        order: list[str] = []
        state: dict[str, int] = {}
        for root in self.gates:
            if root in state:
                continue
            stack = [(root, iter(self.gates[root][1]))]
            state[root] = 1
            while stack:
                g, it = stack[-1]
                nxt = next((c for c in it if c in self.gates), None)
                if nxt is None:
                    stack.pop()
                    state[g] = 2
                    order.append(g)
                elif state.get(nxt) == 1:
                    raise CyclicCircuit(f"cycle through gate {nxt}")
                elif nxt not in state:
                    state[nxt] = 1
                    stack.append((nxt, iter(self.gates[nxt][1])))
        return order

    def evaluate(self) -> int:
        val = dict(self.inputs)
        for g in self.topological_order():
            op, kids = self.gates[g]
            bits = [val[c] for c in kids]
            val[g] = int(all(bits)) if op == "AND" else int(any(bits))
        return val[self.output]


_GATE = re.compile(r"^gate\s+(\w+)\s*=\s*(AND|OR)\s*\(([^)]*)\)$")
_INPUT = re.compile(r"^input\s+(\w+)\s*=\s*([01])$")
_OUTPUT = re.compile(r"^output\s+(\w+)$")


def parse_circuit(text: str) -> MonotoneCircuit:
    gates: dict[str, tuple[str, tuple[str, ...]]] = {}
    inputs: dict[str, int] = {}
    output = None
    for line, st in _statements(text):
        if m := _GATE.match(st):
            name, op, args = m.groups()
            kids = tuple(a.strip() for a in args.split(",") if a.strip())
            if name in gates or name in inputs:
                raise ParseError(f"duplicate name {name!r}", line)
            gates[name] = (op, kids)
        elif m := _INPUT.match(st):
            if m.group(1) in gates or m.group(1) in inputs:
                raise ParseError(f"duplicate name {m.group(1)!r}", line)
            inputs[m.group(1)] = int(m.group(2))
        elif m := _OUTPUT.match(st):
            if output is not None:
                raise ParseError("more than one output", line)
            output = m.group(1)
        else:
            raise ParseError(f"cannot parse statement {st!r}", line)
    if output is None:
        raise ParseError("missing 'output' statement")
    try:
        return MonotoneCircuit(gates, inputs, output)
    except ValueError as e:
        raise ParseError(str(e)) from None


def dump_circuit(c: MonotoneCircuit) -> str:
    lines = [f"input {k} = {v};" for k, v in c.inputs.items()]
    lines += [f"gate {g} = {op}({', '.join(kids)});" for g, (op, kids) in c.gates.items()]
    lines.append(f"output {c.output};")
    return "\n".join(lines) + "\n"


def gen_circuit_instance(c: MonotoneCircuit) -> tuple[BranchingProcess, Dpa]:
    """BP and 2-state DPA ("some X_1 occurs"): positive acceptance iff the circuit is 1."""
    c.topological_order()

    def tname(x: str) -> str:
        return f"X_{c.inputs[x]}" if x in c.inputs else f"X_g{x}"

    rules = [("X_0", 1, ["X_0"]), ("X_1", 1, ["X_1"])]
    for g, (op, kids) in c.gates.items():
        if op == "AND":
            rules.append((tname(g), 1, [tname(k) for k in kids]))
        else:
            rules += [(tname(g), Fraction(1, len(kids)), [tname(k)]) for k in kids]
    types = ["X_0", "X_1"] + [tname(g) for g in c.gates]
    bp = make_bp(rules, tname(c.output), types=types)
    hit = bp.index("X_1")
    delta = tuple(tuple(1 if (q == 1 or x == hit) else 0 for x in range(len(types))) for q in (0, 1))
    dpa = Dpa(("wait", "seen"), bp.types, delta, 0, (1, 2))
    return bp, dpa


# -- alternating Turing machines -------------------------------------------


@dataclass(frozen=True)
class AtmTransition:
    src: str
    read: str
    write: str
    move: int  # -1 or +1
    dst: str


@dataclass(frozen=True)
class AtmSpec:
    exists: tuple[str, ...]
    forall: tuple[str, ...]
    accept: str
    alphabet: tuple[str, ...]
    transitions: tuple[AtmTransition, ...]
    initial: str

    def __post_init__(self):
        states = self.states
        if len(set(states)) != len(states):
            raise ValidationError(["state names must be distinct across partitions"])
        problems = []
        for t in self.transitions:
            if t.src == self.accept or t.src not in states:
                problems.append(f"transition source {t.src!r} is not an existential or universal state")
            if t.dst not in states:
                problems.append(f"unknown target state {t.dst!r}")
            if t.read not in self.alphabet or t.write not in self.alphabet:
                problems.append(f"unknown letter in {t}")
            if t.move not in (-1, 1):
                problems.append(f"move must be -1 or +1 in {t}")
        if self.initial not in states:
            problems.append(f"unknown initial state {self.initial!r}")
        for s in self.exists + self.forall:
            for a in self.alphabet:
                if not self.moves(s, a):
                    problems.append(f"no transition for ({s}, {a})")
        if problems:
            raise ValidationError(problems)

    @property
    def states(self) -> tuple[str, ...]:
        return self.exists + self.forall + (self.accept,)

    def moves(self, s: str, a: str) -> list[int]:
        return [k for k, t in enumerate(self.transitions) if t.src == s and t.read == a]


def parse_atm(text: str) -> AtmSpec:
    """``atm; exists ..; forall ..; accept s; alphabet ..; initial s; t s a b +1 s2; ...``"""
    stmts = list(_statements(text))
    if not stmts or stmts[0][1] != "atm":
        raise ParseError("file must start with 'atm;'", stmts[0][0] if stmts else 1)
    decl: dict[str, list[str]] = {}
    trans = []
    for line, st in stmts[1:]:
        w = st.split()
        if w[0] == "t":
            if len(w) != 6 or w[4] not in ("-1", "+1", "1", "L", "R"):
                raise ParseError(f"bad transition {st!r}", line)
            move = -1 if w[4] in ("-1", "L") else 1
            trans.append(AtmTransition(w[1], w[2], w[3], move, w[5]))
        elif w[0] in ("exists", "forall", "accept", "alphabet", "initial"):
            if w[0] in decl:
                raise ParseError(f"duplicate {w[0]!r} statement", line)
            for nm in w[1:]:
                if not IDENT.match(nm):
                    raise ParseError(f"bad name {nm!r}", line)
            decl[w[0]] = w[1:]
        else:
            raise ParseError(f"cannot parse statement {st!r}", line)
    for key in ("accept", "alphabet", "initial"):
        if key not in decl:
            raise ParseError(f"missing {key!r} statement")
    if len(decl["accept"]) != 1 or len(decl["initial"]) != 1:
        raise ParseError("'accept' and 'initial' take exactly one state")
    return AtmSpec(
        tuple(decl.get("exists", ())),
        tuple(decl.get("forall", ())),
        decl["accept"][0],
        tuple(decl["alphabet"]),
        tuple(trans),
        decl["initial"][0],
    )


def dump_atm(m: AtmSpec) -> str:
    lines = ["atm;"]
    if m.exists:
        lines.append(f"exists {' '.join(m.exists)};")
    if m.forall:
        lines.append(f"forall {' '.join(m.forall)};")
    lines += [f"accept {m.accept};", f"alphabet {' '.join(m.alphabet)};", f"initial {m.initial};"]
    lines += [f"t {t.src} {t.read} {t.write} {t.move:+d} {t.dst};" for t in m.transitions]
    return "\n".join(lines) + "\n"


def _cfg(i: int, s: str, a: str) -> str:
    return f"C{i}_{s}_{a}"


def _tr(i: int, k: int) -> str:
    return f"T{i}_{k}"


def gen_atm_instance(m: AtmSpec, word: Sequence[str], variant: str = "nba0") -> tuple[BranchingProcess, Nba]:
    """BP and NBA simulating ``m`` on ``word`` with the tape kept by the automaton.

    ``nba0``: positive probability of an accepted tree iff m accepts the word.
    ``conba0``: positive probability that all branches are rejected iff m accepts.
    """
    if variant not in ("nba0", "conba0"):
        raise ValueError(f"unknown variant {variant!r}")
    word = list(word)
    n = len(word)
    if n == 0:
        raise EmptyWord("the input word must be nonempty")
    for a in word:
        if a not in m.alphabet:
            raise ValueError(f"letter {a!r} not in the machine alphabet")
    sigma = m.alphabet
    T = m.transitions
    pos = range(1, n + 1)

    types = [_cfg(i, s, a) for i in pos for s in m.states for a in sigma]
    types += [_tr(i, k) for i in pos for k in range(len(T))]
    final = [f"chk{i}" for i in pos] if variant == "nba0" else ["end"]
    types += final + ["E"]
    if len(set(types)) != len(types):
        raise ValueError("state or letter names collide in generated type names")

    rules: list[tuple[str, object, list[str]]] = []
    for i in pos:
        for s in m.states:
            for a in sigma:
                x = _cfg(i, s, a)
                if s == m.accept:
                    rules.append((x, 1, final))
                    continue
                ks = m.moves(s, a)
                if s in m.exists:
                    rules += [(x, Fraction(1, len(ks)), [_tr(i, k)]) for k in ks]
                else:
                    rules.append((x, 1, [_tr(i, k) for k in ks]))
        for k, t in enumerate(T):
            j = i + t.move
            if 1 <= j <= n:
                rules += [(_tr(i, k), Fraction(1, len(sigma)), [_cfg(j, t.dst, b)]) for b in sigma]
            else:
                rules.append((_tr(i, k), 1, ["E"]))
    rules.append(("E", 1, ["E"]))
    rules += [(c, 1, [c]) for c in final]
    bp = make_bp(rules, _cfg(1, m.initial, word[0]), types=types)

    states = [f"q{i}_{a}" for i in pos for a in sigma] + ["f"]
    trans = []
    for i in pos:
        for a in sigma:
            q = f"q{i}_{a}"
            for j in pos:
                for s in m.states:
                    for b in sigma:
                        if i != j or a == b:
                            trans.append((q, _cfg(j, s, b), q))
                        elif variant == "conba0":
                            trans.append((q, _cfg(j, s, b), "f"))
                for k, t in enumerate(T):
                    if i != j:
                        trans.append((q, _tr(j, k), q))
                    elif t.read == a:
                        trans.append((q, _tr(i, k), f"q{i}_{t.write}"))
            if variant == "nba0":
                trans.append((q, f"chk{i}", "f"))
    trans += [("f", x, "f") for x in types]
    initial = [f"q{i}_{word[i - 1]}" for i in pos]
    accepting = ["f"] if variant == "nba0" else states
    return bp, Nba.build(states, bp.types, trans, initial, accepting)


def atm_accepts(m: AtmSpec, word: Sequence[str]) -> bool:
    """Alternating reachability over linear-bounded configurations (least fixpoint)."""
    n = len(word)
    if n == 0:
        raise EmptyWord("the input word must be nonempty")
    from itertools import product as iproduct

    configs = [(i, s, tape) for i in range(n) for s in m.states for tape in iproduct(m.alphabet, repeat=n)]
    win = {c for c in configs if c[1] == m.accept}
    changed = True
    while changed:
        changed = False
        for c in configs:
            if c in win:
                continue
            i, s, tape = c
            succ = []
            for k in m.moves(s, tape[i]):
                t = m.transitions[k]
                j = i + t.move
                if 0 <= j < n:
                    succ.append((j, t.dst, tape[:i] + (t.write,) + tape[i + 1:]))
                else:
                    succ.append(None)  # falls off the tape: losing
            ok = [x is not None and x in win for x in succ]
            if (any(ok) if s in m.exists else all(ok)):
                win.add(c)
                changed = True
    return (0, m.initial, tuple(word)) in win
