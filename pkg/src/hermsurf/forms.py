"""Homogeneous forms over GF(q^2) and their intersection statistics
with a Hermitian surface.

A form of degree d is a map from exponent 4-tuples (summing to d) to
nonzero element indices, under the graded lexicographic monomial order
with x0 > x1 > x2 > x3.  Scalar normalization makes the leading (first
in monomial order) coefficient equal 1; forms are compared per scalar
class through their normalized coefficient vectors.

``intersection_stats`` computes, for a form F and a non-degenerate
surface S with generator set J:

    X          = V(F) n S, its rational points
    J_F        = generators symbolically contained in V(F)
    delta      = d(q+1) - |J_F|
    residuals  = rational points of X on no line of J_F (a nonempty set
                 certifies that the non-line part of X has a rational
                 point; emptiness certifies nothing)
    T(l)       = lines of J_F meeting l (l excluded), per l in J_F
    X_min      = min |T(l)| over J_F (None when J_F is empty)
    a[l][Pi]   = members of T(l) inside the plane Pi, over the book of l
    r[P]       = number of J_F lines through P, for P on their union

plus the flags: is V(F) a multiple of the surface equation, and does
V(F) contain a tangent plane.

Line and plane containment are decided symbolically (the restriction of
F to a parametrization vanishes identically), which is correct over the
algebraic closure for every degree.  Rational vanishing is used only as
a no-false-negative prefilter before the symbolic check.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from functools import lru_cache

import numpy as np

from hermsurf.finite_field import Field
from hermsurf.hermitian import HermitianError, HermitianSurface
from hermsurf.proj_geometry import Line


class FormError(ValueError):
    pass


@lru_cache(maxsize=None)
def monomials(degree: int) -> tuple[tuple[int, int, int, int], ...]:
    """Exponent tuples of degree d in graded lex order, x0 > x1 > x2 > x3."""
    out = []
    for e0 in range(degree, -1, -1):
        for e1 in range(degree - e0, -1, -1):
            for e2 in range(degree - e0 - e1, -1, -1):
                out.append((e0, e1, e2, degree - e0 - e1 - e2))
    return tuple(out)


def monomial_count(degree: int) -> int:
    return math.comb(degree + 3, 3)


def _binom_mod(n: int, k: int, p: int) -> int:
    return math.comb(n, k) % p


class Form:
    """A nonzero homogeneous form in x0..x3 over a fixed field."""

    __slots__ = ("field", "degree", "coeffs")

    def __init__(self, field: Field, degree: int, coeffs: dict):
        if degree < 1:
            raise FormError(f"degree must be >= 1, got {degree}")
        clean = {}
        for exps, c in coeffs.items():
            if c == 0:
                continue
            exps = tuple(int(e) for e in exps)
            if len(exps) != 4 or any(e < 0 for e in exps) or sum(exps) != degree:
                raise FormError(f"bad exponent tuple {exps} for degree {degree}")
            clean[exps] = int(c)
        if not clean:
            raise FormError("the zero form is not allowed")
        self.field = field
        self.degree = degree
        self.coeffs = clean

    # -- structure ------------------------------------------------------

    def terms(self) -> list[tuple[tuple[int, int, int, int], int]]:
        """(exponents, coefficient) pairs in monomial order."""
        return [(m, self.coeffs[m]) for m in monomials(self.degree) if m in self.coeffs]

    def leading_monomial(self) -> tuple[int, int, int, int]:
        return self.terms()[0][0]

    def normalized(self) -> "Form":
        lead = self.coeffs[self.leading_monomial()]
        if lead == 1:
            return self
        inv = self.field.inv(lead)
        return Form(
            self.field,
            self.degree,
            {m: self.field.mul(inv, c) for m, c in self.coeffs.items()},
        )

    def coefficient_vector(self) -> tuple[int, ...]:
        return tuple(self.coeffs.get(m, 0) for m in monomials(self.degree))

    def scale(self, c: int) -> "Form":
        if c == 0:
            raise FormError("cannot scale a form by zero")
        return Form(self.field, self.degree, {m: self.field.mul(c, x) for m, x in self.coeffs.items()})

    def __mul__(self, other: "Form") -> "Form":
        if other.field is not self.field:
            raise FormError("forms over different fields")
        f = self.field
        prod: dict = {}
        for e1, c1 in self.coeffs.items():
            for e2, c2 in other.coeffs.items():
                e = tuple(a + b for a, b in zip(e1, e2))
                prod[e] = f.add(prod.get(e, 0), f.mul(c1, c2))
        return Form(f, self.degree + other.degree, prod)

    def __eq__(self, other):
        return (
            isinstance(other, Form)
            and other.field is self.field
            and other.degree == self.degree
            and other.coeffs == self.coeffs
        )

    def __hash__(self):
        return hash((id(self.field), self.degree, frozenset(self.coeffs.items())))

    def __repr__(self):
        names = ("x0", "x1", "x2", "x3")
        parts = []
        for m, c in self.terms()[:6]:
            mono = "*".join(
                f"{n}^{e}" if e > 1 else n for n, e in zip(names, m) if e
            ) or "1"
            parts.append(f"{c}.{mono}")
        tail = " + ..." if len(self.coeffs) > 6 else ""
        return f"Form(d={self.degree}: {' + '.join(parts)}{tail})"

    # -- evaluation -----------------------------------------------------

    def evaluate(self, point) -> int:
        f = self.field
        total = 0
        for exps, c in self.coeffs.items():
            term = c
            for x, e in zip(point, exps):
                if e:
                    term = f.mul(term, f.pow(x, e))
                    if term == 0:
                        break
            total = f.add(total, term)
        return total

    def values_at(self, pts: np.ndarray) -> np.ndarray:
        """Vectorized evaluation at an (N, 4) array of element indices."""
        f = self.field
        pw = f.pow_table(self.degree)
        acc = np.zeros(len(pts), dtype=np.int16)
        for exps, c in self.coeffs.items():
            term = np.full(len(pts), c, dtype=np.int16)
            for i, e in enumerate(exps):
                if e:
                    term = f.mul_np[term, pw[pts[:, i], e]]
            acc = f.add_np[acc, term]
        return acc


def linear_form(field: Field, coeffs) -> Form:
    return Form(field, 1, {tuple(int(i == j) for i in range(4)): c for j, c in enumerate(coeffs) if c})


def surface_form(surface: HermitianSurface) -> Form:
    """The defining polynomial x^T A x^(q) of the surface, degree q+1."""
    f = surface.field
    q = surface.q
    coeffs: dict = {}
    for i in range(4):
        for j in range(4):
            c = surface.matrix[i][j]
            if c:
                e = [0, 0, 0, 0]
                e[i] += 1
                e[j] += q
                e = tuple(e)
                coeffs[e] = f.add(coeffs.get(e, 0), c)
    return Form(f, q + 1, coeffs)


# ----------------------------------------------------------------------
# restriction and containment
# ----------------------------------------------------------------------

def restrict_to_line(form: Form, P, Q) -> tuple[int, ...]:
    """Coefficients (c_0..c_d) of F(a P + b Q) as a binary form in (a, b),
    c_k multiplying a^(d-k) b^k."""
    f = form.field
    p_mod = f.p
    d = form.degree
    out = [0] * (d + 1)
    for exps, c in form.coeffs.items():
        # expand prod_i (P_i a + Q_i b)^(e_i) by convolving binomials
        poly = [c]  # coefficients in b, degree grows to sum(e_i)
        for pi, qi, e in zip(P, Q, exps):
            if e == 0:
                continue
            factor = []
            for j in range(e + 1):
                b = _binom_mod(e, j, p_mod)
                if b == 0:
                    factor.append(0)
                    continue
                term = f.mul(f.pow(pi, e - j), f.pow(qi, j))
                # lift the integer binomial coefficient into the field
                bc = 0
                for _ in range(b):
                    bc = f.add(bc, 1)
                factor.append(f.mul(bc, term))
            new = [0] * (len(poly) + e)
            for i, a in enumerate(poly):
                if a == 0:
                    continue
                for j, bcoef in enumerate(factor):
                    if bcoef:
                        new[i + j] = f.add(new[i + j], f.mul(a, bcoef))
            poly = new
        for k, a in enumerate(poly):
            if a:
                out[k] = f.add(out[k], a)
    return tuple(out)


def line_contained(form: Form, geometry, line: Line) -> bool:
    """True iff the restriction to the line vanishes identically (over the
    algebraic closure, not just at rational points)."""
    p0, p1 = line.key
    P, Q = geometry.points[p0], geometry.points[p1]
    return not any(restrict_to_line(form, P, Q))


def restrict_to_plane(form: Form, P, Q, R) -> dict[tuple[int, int, int], int]:
    """Nonzero coefficients of F(a P + b Q + c R) as a ternary form."""
    f = form.field
    p_mod = f.p

    def small(n: int) -> int:
        x = 0
        for _ in range(n % p_mod):
            x = f.add(x, 1)
        return x

    out: dict = {}
    for exps, coef in form.coeffs.items():
        poly = {(0, 0, 0): coef}
        for pi, qi, ri, e in zip(P, Q, R, exps):
            if e == 0:
                continue
            factor = {}
            for i in range(e + 1):
                for j in range(e - i + 1):
                    k = e - i - j
                    m = math.comb(e, i) * math.comb(e - i, j) % p_mod
                    if m == 0:
                        continue
                    val = f.mul(f.mul(f.pow(pi, i), f.pow(qi, j)), f.pow(ri, k))
                    val = f.mul(small(m), val)
                    if val:
                        factor[(i, j, k)] = val
            new = {}
            for ea, va in poly.items():
                for eb, vb in factor.items():
                    e2 = (ea[0] + eb[0], ea[1] + eb[1], ea[2] + eb[2])
                    new[e2] = f.add(new.get(e2, 0), f.mul(va, vb))
            poly = new
        for e2, v in poly.items():
            if v:
                out[e2] = f.add(out.get(e2, 0), v)
    return {e: v for e, v in out.items() if v}


def _plane_frame(geometry, plane) -> tuple:
    """Three non-collinear points spanning the plane, deterministically."""
    ids = geometry.plane_point_ids(plane)
    P = geometry.points[int(ids[0])]
    Q = geometry.points[int(ids[1])]
    line_ids = set(geometry.line_through(P, Q).point_ids)
    for i in ids[2:]:
        if int(i) not in line_ids:
            return P, Q, geometry.points[int(i)]
    raise FormError("degenerate plane frame")


def plane_contained(form: Form, geometry, plane) -> bool:
    P, Q, R = _plane_frame(geometry, plane)
    return not restrict_to_plane(form, P, Q, R)


# ----------------------------------------------------------------------
# multivariate division
# ----------------------------------------------------------------------

def divide(form: Form, divisor: Form) -> tuple[dict, dict]:
    """Division by a single divisor under the graded lex order.

    Returns (quotient, remainder) as coefficient dicts satisfying
    form = quotient * divisor + remainder, with no remainder monomial
    divisible by the divisor's leading monomial.  The remainder is zero
    exactly when the divisor divides the form.
    """
    f = form.field
    lead = divisor.leading_monomial()
    lead_inv = f.inv(divisor.coeffs[lead])
    rem = dict(form.coeffs)
    quo: dict = {}
    div_terms = list(divisor.coeffs.items())
    while True:
        target = None
        for m in rem:
            if all(a >= b for a, b in zip(m, lead)):
                if target is None or m > target:
                    target = m
        if target is None:
            break
        shift = tuple(a - b for a, b in zip(target, lead))
        factor = f.mul(rem[target], lead_inv)
        quo[shift] = f.add(quo.get(shift, 0), factor)
        for dm, dc in div_terms:
            m = tuple(a + b for a, b in zip(shift, dm))
            val = f.sub(rem.get(m, 0), f.mul(factor, dc))
            if val:
                rem[m] = val
            else:
                rem.pop(m, None)
    return quo, rem


def divides(divisor: Form, form: Form) -> bool:
    if divisor.degree > form.degree:
        return False
    return not divide(form, divisor)[1]


def exact_quotient(form: Form, divisor: Form) -> Form | None:
    quo, rem = divide(form, divisor)
    if rem:
        return None
    return Form(form.field, form.degree - divisor.degree, quo)


def hermitian_divides(form: Form, surface: HermitianSurface) -> bool:
    """Does the surface equation divide F?  Trivially false for d <= q."""
    if form.degree < surface.q + 1:
        return False
    return divides(surface_form(surface), form)


# ----------------------------------------------------------------------
# intersection statistics
# ----------------------------------------------------------------------

@dataclass
class IntersectionReport:
    """The intersection statistics of one form against one surface.

    When the form is a multiple of the surface equation the generator
    statistics do not apply: ``jf_indices`` and everything after it are
    None.
    """

    form: Form
    q: int
    d: int
    x_count: int
    x_point_ids: tuple[int, ...]
    hermitian_multiple: bool
    contains_tangent_plane: bool
    jf_indices: tuple[int, ...] | None  # indices into surface.generators()
    delta: int | None
    residual_ids: tuple[int, ...] | None  # points of X on no J_F line
    meeting_sizes: tuple[int, ...] | None  # |T(l)| aligned with jf_indices
    x_min: int | None  # min |T(l)|; None when J_F is empty
    book_counts: dict | None  # jf index -> {plane tuple: a_{Pi,l}}
    multiplicities: dict | None  # point id -> r_P on the union of J_F

    @property
    def v2_component(self) -> bool:
        return self.hermitian_multiple

    @property
    def jf_count(self) -> int | None:
        return None if self.jf_indices is None else len(self.jf_indices)

    def jf_lines(self, surface: HermitianSurface) -> tuple[Line, ...]:
        gens = surface.generators()
        return tuple(gens[i] for i in self.jf_indices or ())

    def to_json(self, surface: HermitianSurface, verbose: bool = False) -> dict:
        geom = surface.geometry
        out = {
            "q": self.q,
            "d": self.d,
            "form": form_to_json(self.form, self.q),
            "x_count": self.x_count,
            "hermitian_multiple": self.hermitian_multiple,
            "v2_component": self.v2_component,
            "contains_tangent_plane": self.contains_tangent_plane,
            "jf_count": self.jf_count,
            "delta": self.delta,
            "residual_count": None if self.residual_ids is None else len(self.residual_ids),
            "x_min": self.x_min,
        }
        if verbose:
            out["x_points"] = [list(geom.points[i]) for i in self.x_point_ids]
            if self.jf_indices is not None:
                out["jf_lines"] = [geom.serialize_line(l) for l in self.jf_lines(surface)]
                out["meeting_sizes"] = list(self.meeting_sizes)
                out["multiplicities"] = {
                    str(list(geom.points[pid])): r for pid, r in sorted(self.multiplicities.items())
                }
        return out


def _jf_indices(form: Form, surface: HermitianSurface, zero_positions: np.ndarray) -> tuple[int, ...]:
    """Generators contained in V(F): rational prefilter, symbolic confirm."""
    gen_pos = surface.generator_positions()
    mask = np.zeros(len(surface.point_ids), dtype=bool)
    mask[zero_positions] = True
    candidates = np.nonzero(mask[gen_pos].all(axis=1))[0]
    geom = surface.geometry
    gens = surface.generators()
    return tuple(int(i) for i in candidates if line_contained(form, geom, gens[int(i)]))


def contains_tangent_plane(form: Form, surface: HermitianSurface,
                           zero_positions: np.ndarray | None = None) -> bool:
    """Is some tangent plane of the surface inside V(F)?

    Prefilter: a contained plane's surface section must vanish under F.
    Candidates are then confirmed symbolically.
    """
    if zero_positions is None:
        vals = form.values_at(surface.geometry.arr[surface.point_ids])
        zero_positions = np.nonzero(vals == 0)[0]
    mask = np.zeros(len(surface.point_ids), dtype=bool)
    mask[zero_positions] = True
    geom = surface.geometry
    planes = list(surface.tangent_planes())
    for plane, section in zip(planes, surface.tangent_section_positions()):
        if mask[section].all() and plane_contained(form, geom, plane):
            return True
    return False


def contained_planes(form: Form, geometry) -> list[tuple[int, ...]]:
    """Every plane of PG(3, q^2) inside V(F) (prefilter + symbolic)."""
    vals = form.values_at(geometry.arr)
    zero = vals == 0
    out = []
    for plane in geometry.points:  # dual coordinates enumerate like points
        ids = geometry.plane_point_ids(plane)
        if zero[ids].all() and plane_contained(form, geometry, plane):
            out.append(plane)
    return out


def intersection_stats(form: Form, surface: HermitianSurface) -> IntersectionReport:
    if not surface.is_nondegenerate:
        raise HermitianError("intersection statistics need a non-degenerate surface")
    if form.field is not surface.field:
        raise FormError("form and surface live over different fields")
    q = surface.q
    d = form.degree

    surf_pts = surface.geometry.arr[surface.point_ids]
    vals = form.values_at(surf_pts)
    zero_positions = np.nonzero(vals == 0)[0]
    x_ids = tuple(int(surface.point_ids[i]) for i in zero_positions)

    if hermitian_divides(form, surface):
        return IntersectionReport(
            form=form, q=q, d=d,
            x_count=len(x_ids), x_point_ids=x_ids,
            hermitian_multiple=True,
            contains_tangent_plane=contains_tangent_plane(form, surface, zero_positions),
            jf_indices=None, delta=None, residual_ids=None,
            meeting_sizes=None, x_min=None, book_counts=None, multiplicities=None,
        )

    jf = _jf_indices(form, surface, zero_positions)
    delta = d * (q + 1) - len(jf)
    gens = surface.generators()
    geom = surface.geometry

    jf_point_ids: set[int] = set()
    for i in jf:
        jf_point_ids.update(gens[i].point_ids)
    residuals = tuple(pid for pid in x_ids if pid not in jf_point_ids)

    # T(l), the book table a_{Pi,l}, and multiplicities r_P
    jf_set = set(jf)
    through = surface.generators_through()
    meeting: list[int] = []
    book_counts: dict = {}
    for i in jf:
        line = gens[i]
        tl = set()
        for pid in line.point_ids:
            tl.update(g for g in through[pid] if g in jf_set)
        tl.discard(i)
        meeting.append(len(tl))
        counts = {plane: 0 for plane in geom.book_of_planes(line)}
        line_pts = set(line.point_ids)
        for m in tl:
            other = gens[m]
            shared = next(pid for pid in other.point_ids if pid in line_pts)
            third = next(pid for pid in other.point_ids if pid not in line_pts)
            plane = geom.plane_through(
                geom.points[line.key[0]], geom.points[line.key[1]], geom.points[third]
            )
            counts[plane] += 1
        book_counts[i] = counts

    multiplicities = {}
    for pid in sorted(jf_point_ids):
        multiplicities[pid] = sum(1 for g in through[pid] if g in jf_set)

    return IntersectionReport(
        form=form, q=q, d=d,
        x_count=len(x_ids), x_point_ids=x_ids,
        hermitian_multiple=False,
        contains_tangent_plane=contains_tangent_plane(form, surface, zero_positions),
        jf_indices=jf, delta=delta, residual_ids=residuals,
        meeting_sizes=tuple(meeting),
        x_min=min(meeting) if meeting else None,
        book_counts=book_counts,
        multiplicities=multiplicities,
    )


def incidence_double_count(form: Form, surface: HermitianSurface) -> tuple[int, int]:
    """(|X| * (q+1), sum over generators of |l n V(F)|); always equal,
    because every surface point lies on exactly q+1 generators."""
    surf_pts = surface.geometry.arr[surface.point_ids]
    zero = form.values_at(surf_pts) == 0
    lhs = int(zero.sum()) * (surface.q + 1)
    rhs = int(zero[surface.generator_positions()].sum())
    return lhs, rhs


# ----------------------------------------------------------------------
# batch evaluation helpers (shared by searches and weight enumeration)
# ----------------------------------------------------------------------

def monomial_matrix(field: Field, degree: int, pts: np.ndarray) -> np.ndarray:
    """(M, N) values of every degree-d monomial at every point."""
    pw = field.pow_table(degree)
    rows = []
    for exps in monomials(degree):
        term = np.ones(len(pts), dtype=np.int16)
        for i, e in enumerate(exps):
            if e:
                term = field.mul_np[term, pw[pts[:, i], e]]
        rows.append(term)
    return np.array(rows, dtype=np.int16)


def combination_values(field: Field, rows: np.ndarray, coeffs: np.ndarray) -> np.ndarray:
    """(B, N) values of the linear combinations coeffs @ rows over the field.

    rows is (M, N); coeffs is (B, M) of element indices.
    """
    b = coeffs.shape[0]
    acc = np.zeros((b, rows.shape[1]), dtype=np.int16)
    for i in range(rows.shape[0]):
        col = coeffs[:, i]
        if not col.any():
            continue
        acc = field.add_np[acc, field.mul_np[col[:, None], rows[i][None, :]]]
    return acc


def class_count(order: int, m: int) -> int:
    """Number of scalar classes of nonzero length-m vectors."""
    return (order**m - 1) // (order - 1)


def class_vectors(field: Field, m: int, start: int, stop: int) -> np.ndarray:
    """Decode scalar-class indices [start, stop) into normalized vectors.

    Classes are ordered by the position j of the leading 1, then by the
    remaining m-1-j digits read as a base-(q^2) integer.
    """
    order = field.order
    out = np.zeros((stop - start, m), dtype=np.int16)
    row = 0
    offset = 0
    for j in range(m):
        size = order ** (m - 1 - j)
        lo, hi = max(start, offset), min(stop, offset + size)
        if lo < hi:
            tails = np.arange(lo - offset, hi - offset, dtype=np.int64)
            block = slice(row, row + hi - lo)
            out[block, j] = 1
            for t in range(m - 1 - j):
                div = order ** (m - 2 - j - t)
                out[block, j + 1 + t] = (tails // div) % order
            row += hi - lo
        offset += size
    return out


def form_from_vector(field: Field, degree: int, vec) -> Form:
    return Form(field, degree, {m: int(c) for m, c in zip(monomials(degree), vec) if c})


# ----------------------------------------------------------------------
# serialization
# ----------------------------------------------------------------------

def form_to_json(form: Form, q: int) -> dict:
    return {
        "q": q,
        "d": form.degree,
        "terms": [[list(m), c] for m, c in form.terms()],
    }


def form_from_json(field: Field, data: dict) -> Form:
    if int(data["q"]) != field.q:
        raise FormError(f"form is over q={data['q']}, expected q={field.q}")
    degree = int(data["d"])
    coeffs = {tuple(int(e) for e in m): int(c) for m, c in data["terms"]}
    return Form(field, degree, coeffs)
