"""Multilinear pseudo-Boolean polynomials and their reduction to QUBO form.

Variables are binary (0/1) and identified by string labels.  Because x*x = x
for a binary x, every polynomial is kept multilinear: each stored monomial is
a sorted tuple of distinct labels mapped to a real coefficient.  The degree-0
term is kept separately in ``constant`` and is carried all the way into the
QUBO offset, so solver energies can be compared directly against the objective
the polynomial came from.
"""

from __future__ import annotations

import json
from collections import defaultdict
from dataclasses import dataclass


class MissingVariableError(KeyError):
    """An assignment does not cover a required variable."""

    def __init__(self, label: str):
        super().__init__(label)
        self.label = label

    def __str__(self) -> str:
        return f"assignment is missing variable {self.label!r}"


TermKey = tuple[str, ...]


class PseudoBooleanPolynomial:
    """Real-coefficient multilinear polynomial over binary variables.

    Construction normalizes: repeated labels inside a term collapse (x*x = x),
    duplicate terms merge, and exact-zero coefficients are dropped.  Treat
    instances as read-only once built; the arithmetic operators return new
    polynomials (``+=`` mutates, which the builders here rely on).
    """

    __slots__ = ("terms", "constant")

    def __init__(self, terms=None, constant: float = 0.0):
        self.terms: dict[TermKey, float] = {}
        self.constant = float(constant)
        if terms:
            for variables, coeff in terms.items():
                self.add_term(variables, coeff)

    def add_term(self, variables, coeff: float) -> None:
        key = tuple(sorted(set(variables)))
        coeff = float(coeff)
        if coeff == 0.0:
            return
        if not key:
            self.constant += coeff
            return
        merged = self.terms.get(key, 0.0) + coeff
        if merged == 0.0:
            self.terms.pop(key, None)
        else:
            self.terms[key] = merged

    def variables(self) -> tuple[str, ...]:
        seen: set[str] = set()
        for key in self.terms:
            seen.update(key)
        return tuple(sorted(seen))

    def degree(self) -> int:
        return max((len(key) for key in self.terms), default=0)

    def evaluate(self, assignment) -> float:
        """Value at a 0/1 assignment covering every variable of the polynomial."""
        total = self.constant
        for key, coeff in self.terms.items():
            value = coeff
            for label in key:
                try:
                    bit = assignment[label]
                except KeyError:
                    raise MissingVariableError(label) from None
                if not bit:
                    value = 0.0
            total += value
        return total

    def normalized(self) -> "PseudoBooleanPolynomial":
        """Copy in normal form.  Instances built via the public API already are."""
        out = PseudoBooleanPolynomial(constant=self.constant)
        for key, coeff in self.terms.items():
            out.add_term(key, coeff)
        return out

    def copy(self) -> "PseudoBooleanPolynomial":
        out = PseudoBooleanPolynomial(constant=self.constant)
        out.terms = dict(self.terms)
        return out

    def __iadd__(self, other) -> "PseudoBooleanPolynomial":
        if isinstance(other, PseudoBooleanPolynomial):
            self.constant += other.constant
            for key, coeff in other.terms.items():
                self.add_term(key, coeff)
        else:
            self.constant += float(other)
        return self

    def __add__(self, other) -> "PseudoBooleanPolynomial":
        out = self.copy()
        out += other
        return out

    __radd__ = __add__

    def __sub__(self, other) -> "PseudoBooleanPolynomial":
        if isinstance(other, PseudoBooleanPolynomial):
            return self + (-1.0) * other
        return self + (-float(other))

    def __neg__(self) -> "PseudoBooleanPolynomial":
        return (-1.0) * self

    def __mul__(self, other) -> "PseudoBooleanPolynomial":
        if isinstance(other, PseudoBooleanPolynomial):
            out = PseudoBooleanPolynomial(constant=self.constant * other.constant)
            if other.constant != 0.0:
                for key, coeff in self.terms.items():
                    out.add_term(key, coeff * other.constant)
            if self.constant != 0.0:
                for key, coeff in other.terms.items():
                    out.add_term(key, self.constant * coeff)
            for k1, c1 in self.terms.items():
                for k2, c2 in other.terms.items():
                    out.add_term(k1 + k2, c1 * c2)  # add_term applies x*x = x
            return out
        scalar = float(other)
        out = PseudoBooleanPolynomial(constant=self.constant * scalar)
        if scalar != 0.0:
            for key, coeff in self.terms.items():
                out.terms[key] = coeff * scalar
        return out

    __rmul__ = __mul__

    def __eq__(self, other) -> bool:
        if not isinstance(other, PseudoBooleanPolynomial):
            return NotImplemented
        return self.constant == other.constant and self.terms == other.terms

    def __repr__(self) -> str:
        return f"PseudoBooleanPolynomial({self.terms!r}, constant={self.constant!r})"


@dataclass(frozen=True)
class Qubo:
    """Quadratic form over binary variables.

    Energy of an assignment x is ``offset + sum_i linear[i]*x_i +
    sum_{i<j} quadratic[i,j]*x_i*x_j``.  Quadratic keys are pairs of distinct
    labels stored once, in lexicographic order.  ``variables`` fixes the
    variable order used by solvers and serialization; it may list variables
    that carry no coefficient.
    """

    variables: tuple[str, ...]
    linear: dict[str, float]
    quadratic: dict[tuple[str, str], float]
    offset: float = 0.0

    def __post_init__(self):
        known = set(self.variables)
        if len(known) != len(self.variables):
            raise ValueError("duplicate labels in variable list")
        for label in self.linear:
            if label not in known:
                raise ValueError(f"linear term references unknown variable {label!r}")
        for a, b in self.quadratic:
            if a >= b:
                raise ValueError(f"quadratic key ({a!r}, {b!r}) is not in canonical order")
            if a not in known or b not in known:
                raise ValueError(f"quadratic term references unknown variable in ({a!r}, {b!r})")

    @classmethod
    def from_polynomial(cls, poly: PseudoBooleanPolynomial, variables=None) -> "Qubo":
        linear: dict[str, float] = {}
        quadratic: dict[tuple[str, str], float] = {}
        for key, coeff in poly.terms.items():
            if len(key) == 1:
                linear[key[0]] = coeff
            elif len(key) == 2:
                quadratic[(key[0], key[1])] = coeff
            else:
                raise ValueError(
                    f"monomial {key} has degree {len(key)}; a QUBO holds degree <= 2 only"
                )
        if variables is None:
            variables = poly.variables()
        return cls(tuple(variables), linear, quadratic, poly.constant)

    def energy(self, assignment) -> float:
        """Evaluate the quadratic form; the assignment must cover ``variables``."""
        for label in self.variables:
            if label not in assignment:
                raise MissingVariableError(label)
        total = self.offset
        for label, coeff in self.linear.items():
            if assignment[label]:
                total += coeff
        for (a, b), coeff in self.quadratic.items():
            if assignment[a] and assignment[b]:
                total += coeff
        return total


@dataclass(frozen=True)
class AuxDefinition:
    aux: str
    pair: tuple[str, str]
    weight: float


@dataclass(frozen=True)
class ReductionMap:
    """Auxiliary variables introduced by quadratization, in creation order.

    Each auxiliary stands for the product of its pair; pairs may reference
    earlier auxiliaries (nested reduction).
    """

    aux_defs: tuple[AuxDefinition, ...] = ()

    def __post_init__(self):
        seen = set()
        for d in self.aux_defs:
            if d.aux in seen:
                raise ValueError(f"auxiliary {d.aux!r} defined twice")
            seen.add(d.aux)
            if d.weight <= 0:
                raise ValueError(f"auxiliary {d.aux!r} has non-positive weight {d.weight}")

    def aux_labels(self) -> tuple[str, ...]:
        return tuple(d.aux for d in self.aux_defs)

    def extend(self, assignment) -> dict:
        """Return a copy of the assignment with every auxiliary set to its product."""
        out = dict(assignment)
        for d in self.aux_defs:
            a, b = d.pair
            out[d.aux] = 1 if (out[a] and out[b]) else 0
        return out


def rosenberg_gadget(x: str, y: str, z: str, weight: float) -> PseudoBooleanPolynomial:
    """Penalty polynomial that is 0 iff z = x*y and >= weight otherwise.

    Expands to ``weight * (3z + xy - 2zx - 2zy)``; adding it lets z replace the
    product x*y in any minimization without changing the minima.
    """
    if weight <= 0:
        raise ValueError(f"gadget weight must be positive, got {weight}")
    if len({x, y, z}) != 3:
        raise ValueError("gadget variables x, y, z must be distinct")
    w = float(weight)
    gadget = PseudoBooleanPolynomial()
    gadget.add_term((z,), 3.0 * w)
    gadget.add_term((x, y), w)
    gadget.add_term((z, x), -2.0 * w)
    gadget.add_term((z, y), -2.0 * w)
    return gadget


AUX_SEPARATOR = "*"


def quadratize(
    poly: PseudoBooleanPolynomial,
    penalty_weight: float | None = None,
    variables=None,
) -> tuple[Qubo, ReductionMap]:
    """Rewrite a multilinear polynomial as a QUBO whose minima project back.

    Repeatedly substitutes the variable pair occurring in the most monomials
    of degree >= 3 with a fresh auxiliary (ties broken by lexicographic order
    of the pair), adding a :func:`rosenberg_gadget` so that in any global
    minimizer each auxiliary equals the product it replaced.

    With ``penalty_weight=None`` each substitution uses the dominating weight
    ``1 + sum(|coeff|)`` over the monomials currently containing the pair, so
    violating an auxiliary can never pay for itself; a fixed positive value can
    be supplied instead.  Auxiliary labels are the pair labels joined by
    ``'*'``, which therefore must not appear in input labels.

    Returns the QUBO (variable order: ``variables`` if given, else the sorted
    input variables, followed by auxiliaries in creation order) and the
    reduction map.  Degree <= 2 input passes through with an empty map.
    """
    if penalty_weight is not None and penalty_weight <= 0:
        raise ValueError(f"penalty weight must be positive, got {penalty_weight}")

    base_vars = tuple(variables) if variables is not None else poly.variables()
    missing = set(poly.variables()) - set(base_vars)
    if missing:
        raise ValueError(f"variable list omits polynomial variables: {sorted(missing)}")

    terms = dict(poly.terms)
    constant = poly.constant
    used_labels = set(base_vars)

    # pair -> set of degree>=3 term keys containing both labels
    index: dict[tuple[str, str], set[TermKey]] = defaultdict(set)

    def register(key: TermKey) -> None:
        if len(key) >= 3:
            for i in range(len(key)):
                for j in range(i + 1, len(key)):
                    index[(key[i], key[j])].add(key)

    def unregister(key: TermKey) -> None:
        if len(key) >= 3:
            for i in range(len(key)):
                for j in range(i + 1, len(key)):
                    index[(key[i], key[j])].discard(key)

    def add(key: TermKey, coeff: float) -> None:
        nonlocal constant
        if coeff == 0.0:
            return
        if not key:
            constant += coeff
            return
        old = terms.get(key)
        merged = (old if old is not None else 0.0) + coeff
        if merged == 0.0:
            if old is not None:
                del terms[key]
                unregister(key)
        else:
            terms[key] = merged
            if old is None:
                register(key)

    for key in terms:
        register(key)

    aux_defs: list[AuxDefinition] = []
    while True:
        live = {pair: keys for pair, keys in index.items() if keys}
        if not live:
            break
        pair = min(live, key=lambda p: (-len(live[p]), p))
        a, b = pair
        aux = f"{a}{AUX_SEPARATOR}{b}"
        if aux in used_labels:
            raise ValueError(
                f"auxiliary label {aux!r} collides with an existing variable; "
                f"input labels must not contain {AUX_SEPARATOR!r}"
            )
        used_labels.add(aux)

        affected = sorted(live[pair])
        if penalty_weight is None:
            weight = 1.0 + abs(terms.get(pair, 0.0)) + sum(abs(terms[k]) for k in affected)
        else:
            weight = float(penalty_weight)

        for key in affected:
            coeff = terms.pop(key)
            unregister(key)
            new_key = tuple(sorted((set(key) - {a, b}) | {aux}))
            add(new_key, coeff)

        add((aux,), 3.0 * weight)
        add(pair, weight)
        add(tuple(sorted((aux, a))), -2.0 * weight)
        add(tuple(sorted((aux, b))), -2.0 * weight)
        aux_defs.append(AuxDefinition(aux, pair, weight))

    reduced = PseudoBooleanPolynomial(constant=constant)
    reduced.terms = terms
    order = base_vars + tuple(d.aux for d in aux_defs)
    return Qubo.from_polynomial(reduced, variables=order), ReductionMap(tuple(aux_defs))


def qubo_to_json_dict(qubo: Qubo, reduction: ReductionMap | None = None, metadata: dict | None = None) -> dict:
    doc = {
        "variables": list(qubo.variables),
        "linear": {label: coeff for label, coeff in qubo.linear.items()},
        "quadratic": [[a, b, coeff] for (a, b), coeff in sorted(qubo.quadratic.items())],
        "offset": qubo.offset,
        "reduction": [
            {"aux": d.aux, "pair": list(d.pair), "weight": d.weight}
            for d in (reduction.aux_defs if reduction is not None else ())
        ],
    }
    if metadata is not None:
        doc["metadata"] = metadata
    return doc


def qubo_from_json_dict(doc: dict) -> tuple[Qubo, ReductionMap, dict | None]:
    qubo = Qubo(
        variables=tuple(doc["variables"]),
        linear={label: float(c) for label, c in doc["linear"].items()},
        quadratic={(a, b): float(c) for a, b, c in doc["quadratic"]},
        offset=float(doc["offset"]),
    )
    reduction = ReductionMap(
        tuple(
            AuxDefinition(entry["aux"], (entry["pair"][0], entry["pair"][1]), float(entry["weight"]))
            for entry in doc.get("reduction", ())
        )
    )
    return qubo, reduction, doc.get("metadata")


def qubo_to_json(qubo: Qubo, reduction: ReductionMap | None = None, metadata: dict | None = None) -> str:
    """Serialize deterministically; round-trips preserve evaluation exactly."""
    return json.dumps(qubo_to_json_dict(qubo, reduction, metadata), indent=2, sort_keys=True) + "\n"


def qubo_from_json(text: str) -> tuple[Qubo, ReductionMap, dict | None]:
    return qubo_from_json_dict(json.loads(text))
