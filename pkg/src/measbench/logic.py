"""Projector lattice: subspace-intersection meet and the strict variant.

The orthodox meet of two projectors is the projector onto the intersection
of their ranges. The strict variant refuses to answer for noncommuting
pairs and hands back an :class:`Undefined` marker instead of a number.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .hilbert import (
    Projector,
    as_projector,
    as_state,
    commutator_norm,
    expectation,
)

TOL_MEET = 1e-8
TOL_COMMUTE = 1e-10
TOL_BASIS = 1e-9


@dataclass(frozen=True)
class Undefined:
    """Marker for a conjunction the formalism does not define.

    ``commutator`` is the norm that triggered it (``nan`` when propagated
    from an upstream undefined quantity).
    """

    commutator: float = float("nan")

    def __bool__(self):
        return False


@dataclass(frozen=True)
class MeetResult:
    projector: Projector | None
    undefined: Undefined | None = None

    @property
    def defined(self) -> bool:
        return self.projector is not None


def meet(P, Q, tol: float = TOL_MEET) -> Projector:
    """Projector onto ``Range(P) ∩ Range(Q)``.

    The intersection is the eigenvalue-2 eigenspace of ``P + Q``; eigenvalues
    above ``2 - tol`` are counted as 2.
    """
    p, q = as_projector(P), as_projector(Q)
    if p.dim != q.dim:
        raise ValueError(f"dimension mismatch: {p.dim} vs {q.dim}")
    w, v = np.linalg.eigh(p.matrix + q.matrix)
    return Projector.onto(v[:, w > 2 - tol], n=p.dim)


def meet_all(projectors, tol: float = TOL_MEET) -> Projector:
    """Fold :func:`meet` over a nonempty sequence."""
    it = iter(projectors)
    acc = as_projector(next(it))
    for p in it:
        if acc.rank == 0:
            break
        acc = meet(acc, p, tol)
    return acc


def meet_strict(P, Q, tol_commute: float = TOL_COMMUTE) -> MeetResult:
    """Meet for commuting projectors only.

    For commuting pairs the intersection projector is simply ``PQ``;
    otherwise the result is undefined and carries the commutator norm.
    """
    p, q = as_projector(P), as_projector(Q)
    c = commutator_norm(p.matrix, q.matrix)
    if c > tol_commute:
        return MeetResult(None, Undefined(c))
    return MeetResult(Projector(p.matrix @ q.matrix))


def ql_sequence_probability(a, P, Q, mode: str = "orthodox"):
    """Probability of the conjunction "P and Q" in state ``a``.

    ``mode='orthodox'`` uses the subspace meet (zero for distinct rank-one
    projectors). ``mode='strict'`` returns an :class:`Undefined` when the
    projectors do not commute.
    """
    a = as_state(a)
    if a.vector is None:
        raise ValueError("ql_sequence_probability needs a vector state")
    if mode == "orthodox":
        m = meet(P, Q)
    elif mode == "strict":
        r = meet_strict(P, Q)
        if not r.defined:
            return r.undefined
        m = r.projector
    else:
        raise ValueError(f"unknown mode {mode!r}")
    return float(np.clip(expectation(a, m.matrix).real, 0.0, 1.0))


def check_complete_basis(basis, tol: float = TOL_BASIS, rank_one: bool = True):
    """Raise unless ``basis`` is a complete family of orthogonal projectors."""
    ps = [as_projector(b) for b in basis]
    if not ps:
        raise ValueError("empty projector family")
    n = ps[0].dim
    if any(p.dim != n for p in ps):
        raise ValueError("projectors in the family have different dimensions")
    if rank_one and any(p.rank != 1 for p in ps):
        raise ValueError("family members must be rank one")
    total = sum(p.matrix for p in ps)
    if np.max(np.abs(total - np.eye(n))) > tol:
        raise ValueError("incomplete basis: projectors do not sum to identity")
    for i in range(len(ps)):
        for j in range(i + 1, len(ps)):
            if np.max(np.abs(ps[i].matrix @ ps[j].matrix)) > tol:
                raise ValueError("projectors in the family are not orthogonal")
    return ps


@dataclass(frozen=True)
class ChainSumCheck:
    lhs: float
    rhs: float
    delta: float


def ql_chain_sum_check(a, basis_b, Pc) -> ChainSumCheck:
    """Compare ``sum_b P_abc`` (orthodox meet) with ``P_ac``.

    The difference is reported, never asserted: it vanishes when ``Pc`` is a
    member of the basis (or the identity) and equals ``P_ac`` when ``Pc`` is
    rank one but outside the basis.
    """
    bs = check_complete_basis(basis_b)
    lhs = sum(ql_sequence_probability(a, b, Pc, "orthodox") for b in bs)
    rhs = float(np.clip(expectation(a, as_projector(Pc).matrix).real, 0.0, 1.0))
    return ChainSumCheck(lhs, rhs, abs(lhs - rhs))
