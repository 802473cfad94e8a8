"""CSP templates and a GF(2) elimination solver for parity templates."""
from __future__ import annotations

import itertools
from dataclasses import dataclass

from .structures import Structure, Vocabulary, find_homomorphism


def c_ell_vocabulary(ell: int) -> Vocabulary:
    return Vocabulary.of(("R0", ell), ("R1", ell))


def build_c_ell(ell: int) -> Structure:
    """Universe {0,1}; R0 holds the even-parity ell-tuples, R1 the odd ones."""
    if ell < 2:
        raise ValueError("ell must be >= 2")
    rel = {"R0": [], "R1": []}
    for t in itertools.product((0, 1), repeat=ell):
        rel[f"R{sum(t) % 2}"].append(t)
    return Structure(c_ell_vocabulary(ell), 2, rel)


def is_c_ell(S: Structure) -> bool:
    """Whether S is literally one of the parity templates."""
    names = S.vocab.names
    if names != ("R0", "R1") or S.n != 2:
        return False
    ell = S.vocab.arity("R0")
    return ell >= 2 and S.vocab.arity("R1") == ell and S == build_c_ell(ell)


def build_hypergraph_target(n: int, m: int, k: int | None = None) -> Structure:
    """Complete n-uniform hypergraph on m colours (``k`` None or 1), or the
    k-weak colouring template: n-tuples over ``range(m)`` in which no colour
    occurs more than k times."""
    if n < 2 or m < 2:
        raise ValueError("need n >= 2 and m >= 2")
    if k is None:
        k = 1
    if k < 1:
        raise ValueError("k must be >= 1")
    vocab = Vocabulary.of(("R", n))
    rel = [t for t in itertools.product(range(m), repeat=n)
           if max(t.count(c) for c in set(t)) <= k]
    return Structure(vocab, m, {"R": rel})


def parse_target(spec: str) -> Structure:
    """``c<ell>`` or ``h:<n>:<m>[:<k>]``."""
    s = spec.strip().lower()
    if s.startswith("c") and s[1:].isdigit():
        return build_c_ell(int(s[1:]))
    if s.startswith("h:"):
        parts = [int(x) for x in s[2:].split(":")]
        return build_hypergraph_target(*parts)
    raise ValueError(f"unknown target {spec!r}")


# ---- XOR systems -------------------------------------------------------------

@dataclass(frozen=True)
class XorSystem:
    variable_count: int
    equations: tuple[tuple[tuple[int, ...], int], ...]

    def __post_init__(self):
        for support, parity in self.equations:
            if parity not in (0, 1):
                raise ValueError("parity must be 0 or 1")
            if list(support) != sorted(set(support)):
                raise ValueError("support must be sorted and duplicate free")
            if support and support[-1] >= self.variable_count:
                raise ValueError(f"variable {support[-1]} out of range")

    @classmethod
    def build(cls, variable_count: int, equations) -> "XorSystem":
        """Canonicalise raw (support, parity) pairs; repeated variables cancel."""
        out = []
        for support, parity in equations:
            odd = sorted(v for v, c in _counts(support).items() if c % 2)
            out.append((tuple(odd), int(parity) & 1))
        return cls(variable_count, tuple(out))

    def is_satisfied_by(self, bits) -> bool:
        return all(sum(bits[v] for v in s) % 2 == p for s, p in self.equations)

    def to_text(self) -> str:
        lines = [f"# variables {self.variable_count}"]
        for support, parity in self.equations:
            lhs = " ".join(f"v{v}" for v in support)
            lines.append(f"{lhs} = {parity}".lstrip())
        return "\n".join(lines) + "\n"

    @classmethod
    def from_text(cls, text: str) -> "XorSystem":
        eqs = []
        declared = None
        for raw in text.splitlines():
            line = raw.strip()
            if not line:
                continue
            if line.startswith("#"):
                parts = line[1:].split()
                if len(parts) == 2 and parts[0] == "variables":
                    declared = int(parts[1])
                continue
            lhs, _, rhs = line.partition("=")
            if not _:
                raise ValueError(f"malformed equation line {raw!r}")
            support = [int(tok[1:]) for tok in lhs.split()]
            if any(not tok.startswith("v") for tok in lhs.split()):
                raise ValueError(f"malformed variable in {raw!r}")
            eqs.append((support, int(rhs)))
        top = max((v + 1 for s, _ in eqs for v in s), default=0)
        return cls.build(declared if declared is not None else top, eqs)


def _counts(items):
    c = {}
    for x in items:
        c[x] = c.get(x, 0) + 1
    return c


def structure_to_xor(A: Structure) -> XorSystem:
    """One variable per element; a tuple in R_p becomes ``sum = p``."""
    names = A.vocab.names
    if names != ("R0", "R1") or A.vocab.arity("R0") != A.vocab.arity("R1"):
        raise ValueError("structure_to_xor needs the vocabulary {R0, R1} of equal arity")
    eqs = [(t, 0) for t in A.tuples("R0")] + [(t, 1) for t in A.tuples("R1")]
    return XorSystem.build(A.n, eqs)


def solve_xor(system: XorSystem) -> list[int] | None:
    """Gauss-Jordan elimination over GF(2).

    Each row is a Python int used as a bitset: bit ``v`` for variable v and
    bit ``variable_count`` for the right-hand side.  Free variables are set
    to 0.  Returns None iff the system derives ``0 = 1``.
    """
    nv = system.variable_count
    rhs_bit = 1 << nv
    rows = []
    for support, parity in system.equations:
        row = rhs_bit if parity else 0
        for v in support:
            row |= 1 << v
        rows.append(row)
    pivots = []
    r = 0
    for col in range(nv):
        mask = 1 << col
        pivot = next((i for i in range(r, len(rows)) if rows[i] & mask), None)
        if pivot is None:
            continue
        rows[r], rows[pivot] = rows[pivot], rows[r]
        for i in range(len(rows)):
            if i != r and rows[i] & mask:
                rows[i] ^= rows[r]
        pivots.append(col)
        r += 1
    for row in rows[r:]:
        if row == rhs_bit:
            return None
    bits = [0] * nv
    for i, col in enumerate(pivots):
        bits[col] = 1 if rows[i] & rhs_bit else 0
    return bits


def solve_c_ell_instance(A: Structure) -> dict[int, int] | None:
    """Homomorphism into the parity template via elimination."""
    bits = solve_xor(structure_to_xor(A))
    if bits is None:
        return None
    return dict(enumerate(bits))


def solve_csp(A: Structure, target: Structure) -> dict[int, int] | None:
    """Dispatch: elimination for parity templates, backtracking otherwise."""
    if is_c_ell(target) and A.vocab == target.vocab:
        return solve_c_ell_instance(A)
    return find_homomorphism(A, target)
