"""p-elementary quadratic and bilinear forms: classification, order tables, generators."""

from __future__ import annotations

from itertools import product


class FormError(Exception):
    pass


class Degenerate(FormError):
    pass


class WrongKind(FormError):
    pass


class NotIsotropic(FormError):
    pass


class TooLarge(FormError):
    pass


ENUM_BOUND = 3 ** 5  # default cap on p^dim for exhaustive enumeration
GROUP_BUDGET = 10 ** 6


class ElementaryForm:
    """A p-elementary form on (Z/pZ)^a.

    For p = 2 quadratic forms the gram diagonal holds 2*q(e_k) as an element of
    Z/4 and the off-diagonal entries hold b(e_k, e_l) mod 2.  For bilinear forms
    (and every p != 2 form) the gram is the matrix of b over F_p, and for odd p
    the quadratic form is q(x) = x G x^T / 2 mod p.
    """

    __slots__ = ("p", "kind", "dim", "gram")

    def __init__(self, p: int, kind: str, gram):
        if kind not in ("quadratic", "bilinear"):
            raise ValueError("kind must be quadratic or bilinear")
        a = len(gram)
        ent = []
        for i in range(a):
            row = []
            for j in range(a):
                m = 4 if (p == 2 and kind == "quadratic" and i == j) else p
                row.append(int(gram[i][j]) % m)
            ent.append(tuple(row))
        self.p = p
        self.kind = kind
        self.dim = a
        self.gram = tuple(ent)
        if _fp_det(self.bilinear_gram(), p) == 0 and a > 0:
            raise Degenerate("associated bilinear form is degenerate")

    def bilinear_gram(self):
        p = self.p
        return tuple(tuple(x % p for x in row) for row in self.gram)

    def b_value(self, x, y) -> int:
        p = self.p
        B = self.bilinear_gram()
        return sum(x[i] * B[i][j] * y[j] for i in range(self.dim) for j in range(self.dim)) % p

    def q_value(self, x) -> int:
        """Quadratic value: 2*q(x) mod 4 at p=2, q(x) mod p for odd p."""
        if self.kind != "quadratic":
            raise WrongKind("bilinear form has no quadratic values")
        if self.p == 2:
            s = sum(self.gram[k][k] * x[k] * x[k] for k in range(self.dim))
            s += 2 * sum(
                self.gram[k][l] * x[k] * x[l]
                for k in range(self.dim)
                for l in range(k + 1, self.dim)
            )
            return s % 4
        inv2 = pow(2, -1, self.p)
        return (inv2 * self.b_value(x, x)) % self.p

    def is_even(self) -> bool:
        return all(self.gram[k][k] % 2 == 0 for k in range(self.dim))

    def __eq__(self, other):
        return (
            isinstance(other, ElementaryForm)
            and (self.p, self.kind, self.gram) == (other.p, other.kind, other.gram)
        )

    def __hash__(self):
        return hash((self.p, self.kind, self.gram))

    def __repr__(self):
        return "ElementaryForm(p=%d, kind=%s, gram=%r)" % (
            self.p,
            self.kind,
            [list(r) for r in self.gram],
        )


def _fp_det(gram, p):
    a = [list(r) for r in gram]
    n = len(a)
    det = 1
    for col in range(n):
        piv = next((i for i in range(col, n) if a[i][col] % p), None)
        if piv is None:
            return 0
        if piv != col:
            a[col], a[piv] = a[piv], a[col]
            det = -det
        det = det * a[col][col] % p
        w = pow(a[col][col], -1, p)
        for i in range(col + 1, n):
            c = a[i][col] * w % p
            if c:
                a[i] = [(x - c * y) % p for x, y in zip(a[i], a[col])]
    return det % p


def _fp_solve(B, rhs, p):
    """One solution of x B = rhs over F_p (B invertible)."""
    n = len(B)
    a = [list(B[i]) + [0] * n for i in range(n)]
    for i in range(n):
        a[i][n + i] = 1
    for col in range(n):
        piv = next(i for i in range(col, n) if a[i][col] % p)
        a[col], a[piv] = a[piv], a[col]
        w = pow(a[col][col], -1, p)
        a[col] = [w * x % p for x in a[col]]
        for i in range(n):
            if i != col and a[i][col]:
                c = a[i][col]
                a[i] = [(x - c * y) % p for x, y in zip(a[i], a[col])]
    inv = [row[n:] for row in a]
    return tuple(sum(rhs[k] * inv[k][j] for k in range(n)) % p for j in range(n))


# ---------------------------------------------------------------------------
# standard blocks


def form_u():
    return ElementaryForm(2, "quadratic", [[0, 1], [1, 0]])


def form_v():
    return ElementaryForm(2, "quadratic", [[2, 1], [1, 2]])


def form_w(eps: int):
    if eps not in (1, 3):
        raise ValueError("eps must be 1 or 3")
    return ElementaryForm(2, "quadratic", [[eps]])


def form_ubar():
    return ElementaryForm(2, "bilinear", [[0, 1], [1, 0]])


def form_wbar():
    return ElementaryForm(2, "bilinear", [[1]])


def direct_sum(f1: ElementaryForm, f2: ElementaryForm) -> ElementaryForm:
    if (f1.p, f1.kind) != (f2.p, f2.kind):
        raise ValueError("incompatible summands")
    n1, n2 = f1.dim, f2.dim
    g = [[0] * (n1 + n2) for _ in range(n1 + n2)]
    for i in range(n1):
        for j in range(n1):
            g[i][j] = f1.gram[i][j]
    for i in range(n2):
        for j in range(n2):
            g[n1 + i][n1 + j] = f2.gram[i][j]
    return ElementaryForm(f1.p, f1.kind, g)


def from_tally(p, kind, tally) -> ElementaryForm:
    """Assemble a form in the normal basis described by a classification tally."""
    blocks = []
    if p == 2 and kind == "quadratic":
        blocks += [form_u()] * tally.get("u", 0)
        blocks += [form_v()] * tally.get("v", 0)
        blocks += [form_w(1)] * tally.get("w1", 0)
        blocks += [form_w(3)] * tally.get("w3", 0)
    elif p == 2:
        blocks += [form_ubar()] * tally.get("ubar", 0)
        blocks += [form_wbar()] * tally.get("wbar", 0)
    else:
        raise ValueError("tally assembly implemented for p=2 only")
    if not blocks:
        return ElementaryForm(p, kind, [])
    out = blocks[0]
    for b in blocks[1:]:
        out = direct_sum(out, b)
    return out


# ---------------------------------------------------------------------------
# classification


def _gauss_sigma(form: ElementaryForm) -> int:
    """Signature mod 8 of a 2-elementary quadratic form via the Gauss sum."""
    if form.dim > 20:
        raise TooLarge("gauss sum over 2^%d points" % form.dim)
    re = im = 0
    for x in product(range(2), repeat=form.dim):
        qq = form.q_value(x)
        if qq == 0:
            re += 1
        elif qq == 1:
            im += 1
        elif qq == 2:
            re -= 1
        else:
            im -= 1
    if im == 0:
        return 0 if re > 0 else 4
    if re == 0:
        return 2 if im > 0 else 6
    if re == im:
        return 1 if re > 0 else 5
    return 7 if re > 0 else 3


def is_square_mod(d: int, p: int) -> bool:
    d %= p
    return d != 0 and pow(d, (p - 1) // 2, p) == 1


def classify(form: ElementaryForm) -> dict:
    """Classification tally; complete by (rank, parity, signature/det class)."""
    a = form.dim
    if form.p != 2:
        out = {"dim": a}
        if a % 2 == 0:
            m = a // 2
            det = _fp_det(form.bilinear_gram(), form.p)
            inv2 = pow(2, -1, form.p)
            # b-gram of h^m has det (-1/4)^m; q-gram over F_p is b/2
            qdet = det * pow(inv2, a, form.p) % form.p
            out["hyperbolic"] = a == 0 or is_square_mod(
                qdet * pow(form.p - 1, m, form.p), form.p
            )
        return out
    if form.kind == "bilinear":
        alt = form.is_even()
        if alt:
            if a % 2:
                raise Degenerate("odd-dimensional alternating form is degenerate")
            return {"ubar": a // 2, "wbar": 0}
        if a % 2:
            return {"ubar": (a - 1) // 2, "wbar": 1}
        return {"ubar": (a - 2) // 2, "wbar": 2}
    sigma = _gauss_sigma(form)
    if form.is_even():
        if sigma == 0:
            return {"u": a // 2, "v": 0, "w1": 0, "w3": 0}
        if sigma == 4:
            return {"u": a // 2 - 1, "v": 1, "w1": 0, "w3": 0}
        raise Degenerate("even form with impossible signature %d" % sigma)
    if a % 2:
        m = (a - 1) // 2
        table = {1: (0, 1, 0), 7: (0, 0, 1), 5: (1, 1, 0), 3: (1, 0, 1)}
        v, w1, w3 = table[sigma]
        return {"u": m - v, "v": v, "w1": w1, "w3": w3}
    m = (a - 2) // 2
    table = {2: (0, 2, 0), 6: (0, 0, 2), 0: (0, 1, 1), 4: (1, 1, 1)}
    v, w1, w3 = table[sigma]
    return {"u": m - v, "v": v, "w1": w1, "w3": w3}


def tally_json(form: ElementaryForm) -> dict:
    return {"p": form.p, "kind": form.kind, "blocks": classify(form)}


# ---------------------------------------------------------------------------
# order tables


def _order_even_2(m: int, plus: bool) -> int:
    # u^m when plus is False, u^(m-1) + v when plus is True
    if m == 0:
        return 1
    sign = 1 if plus else -1
    out = 2 ** (m * (m - 1) + 1) * (2 ** m + sign)
    for k in range(1, m):
        out *= 2 ** (2 * k) - 1
    return out


def _order_sp(m: int) -> int:
    out = 2 ** (m * m)
    for k in range(1, m + 1):
        out *= 2 ** (2 * k) - 1
    return out


def _zeros_even_2(m: int, plus: bool) -> int:
    if m == 0:
        return 1
    sign = 1 if plus else -1
    return 2 ** (m - 1) * (2 ** m - sign)


def order_O_tally(p: int, kind: str, tally: dict) -> int:
    if p != 2:
        a = tally["dim"]
        if a == 0:
            return 1
        if a % 2 == 0:
            m = a // 2
            sign = -1 if tally["hyperbolic"] else 1
            out = 2 * p ** (m * (m - 1)) * (p ** m + sign)
            for k in range(1, m):
                out *= p ** (2 * k) - 1
            return out
        m = (a - 1) // 2
        out = 2 * p ** (m * m)
        for k in range(1, m + 1):
            out *= p ** (2 * k) - 1
        return out
    if kind == "bilinear":
        m, w = tally["ubar"], tally["wbar"]
        if w == 2:
            return 2 ** (2 * m + 1) * _order_sp(m)
        return _order_sp(m)
    u, v, w1, w3 = tally["u"], tally["v"], tally["w1"], tally["w3"]
    m = u + v
    plus = v == 1
    nw = w1 + w3
    if nw == 0:
        return _order_even_2(m, plus)
    if nw == 1:
        return _order_even_2(m, plus)
    if w1 == 2 or w3 == 2:  # w^eps + w^eps
        return 2 * _order_sp(m)
    return 2 ** (2 * m) * _order_even_2(m, plus)


def count_zeros_tally(tally: dict) -> int:
    u, v, w1, w3 = tally["u"], tally["v"], tally["w1"], tally["w3"]
    m = u + v
    plus = v == 1
    nw = w1 + w3
    if nw == 0:
        return _zeros_even_2(m, plus)
    if nw == 1:
        return _zeros_even_2(m, plus)
    if w1 == 2 or w3 == 2:
        return 2 ** (2 * m)
    return 2 * _zeros_even_2(m, plus)


def order_O(form: ElementaryForm) -> int:
    return order_O_tally(form.p, form.kind, classify(form))


def count_zeros(form: ElementaryForm) -> int:
    if form.p != 2 or form.kind != "quadratic":
        raise WrongKind("zero counting is for 2-elementary quadratic forms")
    return count_zeros_tally(classify(form))


# ---------------------------------------------------------------------------
# isometries

class FormIsometry:
    """An automorphism of a form, acting on row vectors by x -> x @ matrix."""

    __slots__ = ("form", "matrix")

    def __init__(self, form: ElementaryForm, matrix):
        p = form.p
        self.form = form
        self.matrix = tuple(tuple(int(x) % p for x in row) for row in matrix)
        if not _preserves(form, self.matrix):
            raise FormError("matrix does not preserve the form")

    def __eq__(self, other):
        return isinstance(other, FormIsometry) and self.matrix == other.matrix

    def __hash__(self):
        return hash(self.matrix)

    def __repr__(self):
        return "FormIsometry(%r)" % (list(map(list, self.matrix)),)


def _apply(mat, x, p):
    n = len(mat)
    return tuple(sum(x[i] * mat[i][j] for i in range(n)) % p for j in range(n))


def _preserves(form: ElementaryForm, mat) -> bool:
    p = form.p
    n = form.dim
    basis = [tuple(1 if i == k else 0 for i in range(n)) for k in range(n)]
    imgs = [_apply(mat, e, p) for e in basis]
    for k in range(n):
        for l in range(k, n):
            if form.b_value(imgs[k], imgs[l]) != form.b_value(basis[k], basis[l]):
                return False
    if form.kind == "quadratic":
        for k in range(n):
            if form.q_value(imgs[k]) != form.q_value(basis[k]):
                return False
    if _fp_det(mat, p) == 0:
        return False
    return True


def transvection(form: ElementaryForm, v) -> FormIsometry:
    """T_v(x) = x + b(x,v) v; needs b(v,v) = 0."""
    if form.p != 2:
        raise WrongKind("transvections live at p = 2")
    v = tuple(x % 2 for x in v)
    if form.b_value(v, v) != 0:
        raise NotIsotropic("b(v,v) != 0")
    n = form.dim
    basis = [tuple(1 if i == k else 0 for i in range(n)) for k in range(n)]
    rows = []
    for k in range(n):
        c = form.b_value(basis[k], v)
        rows.append(tuple((basis[k][j] + c * v[j]) % 2 for j in range(n)))
    bform = form if form.kind == "bilinear" else ElementaryForm(2, "bilinear", form.bilinear_gram())
    return FormIsometry(bform, rows)


def reflection(form: ElementaryForm, v) -> FormIsometry:
    """R_v(x) = x + b(x,v) v with q(v) = 1; preserves the quadratic form."""
    if form.p != 2 or form.kind != "quadratic":
        raise WrongKind("reflections live on 2-elementary quadratic forms")
    v = tuple(x % 2 for x in v)
    if form.q_value(v) != 2:
        raise FormError("q(v) != 1")
    n = form.dim
    basis = [tuple(1 if i == k else 0 for i in range(n)) for k in range(n)]
    rows = []
    for k in range(n):
        c = form.b_value(basis[k], v)
        rows.append(tuple((basis[k][j] + c * v[j]) % 2 for j in range(n)))
    return FormIsometry(form, rows)


def defect(f: FormIsometry, q: ElementaryForm):
    """The unique v with b(v, x) = q(fx) - q(x) for all x."""
    if q.p != 2 or q.kind != "quadratic":
        raise WrongKind("defect needs a 2-elementary quadratic form")
    n = q.dim
    basis = [tuple(1 if i == k else 0 for i in range(n)) for k in range(n)]
    rhs = []
    for e in basis:
        diff = (q.q_value(_apply(f.matrix, e, 2)) - q.q_value(e)) % 4
        assert diff % 2 == 0
        rhs.append((diff // 2) % 2)
    return _fp_solve([list(r) for r in zip(*q.bilinear_gram())], rhs, 2)


def eichler(form: ElementaryForm, a_vec, z) -> FormIsometry:
    """E_a(x) = x + b(x,z)a - b(x,a)z - q(a)b(x,z)z with q(z)=0, b(a,z)=0."""
    if form.p != 2 or form.kind != "quadratic":
        raise WrongKind("Eichler maps live on 2-elementary quadratic forms")
    a_vec = tuple(x % 2 for x in a_vec)
    z = tuple(x % 2 for x in z)
    if form.q_value(z) != 0 or form.b_value(a_vec, z) != 0:
        raise FormError("need q(z)=0 and b(a,z)=0")
    if form.q_value(a_vec) % 2:
        raise FormError("q(a) must be integral")
    qa = (form.q_value(a_vec) // 2) % 2
    n = form.dim
    basis = [tuple(1 if i == k else 0 for i in range(n)) for k in range(n)]
    rows = []
    for e in basis:
        bz = form.b_value(e, z)
        ba = form.b_value(e, a_vec)
        rows.append(
            tuple((e[j] + bz * a_vec[j] + ba * z[j] + qa * bz * z[j]) % 2 for j in range(n))
        )
    return FormIsometry(form, rows)


def oddity_vector(form: ElementaryForm):
    """v with b(v, x) = b(x, x) for all x (p = 2)."""
    B = form.bilinear_gram()
    rhs = [B[k][k] for k in range(form.dim)]
    return _fp_solve([list(r) for r in B], rhs, 2)


# ---------------------------------------------------------------------------
# enumeration oracle and generators


def enumerate_O(form: ElementaryForm, bound: int = ENUM_BOUND):
    """All isometries, by backtracking over images of the basis vectors."""
    p, n = form.p, form.dim
    if p ** n > bound:
        raise TooLarge("p^dim = %d exceeds bound %d" % (p ** n, bound))
    if n == 0:
        return [FormIsometry(form, [])]
    basis = [tuple(1 if i == k else 0 for i in range(n)) for k in range(n)]
    vectors = sorted(product(range(p), repeat=n))
    quad = form.kind == "quadratic"
    out = []

    def rec(k, imgs):
        if k == n:
            mat = tuple(imgs)
            if _fp_det(mat, p):
                out.append(FormIsometry(form, mat))
            return
        want_q = form.q_value(basis[k]) if quad else None
        for w in vectors:
            if quad and form.q_value(w) != want_q:
                continue
            if form.b_value(w, w) != form.b_value(basis[k], basis[k]):
                continue
            if any(
                form.b_value(w, imgs[l]) != form.b_value(basis[k], basis[l])
                for l in range(k)
            ):
                continue
            rec(k + 1, imgs + [w])

    rec(0, [])
    return out


def _close(mats, p, budget=GROUP_BUDGET):
    if not mats:
        return {None}
    n = len(mats[0])
    ident = tuple(tuple(1 if i == j else 0 for j in range(n)) for i in range(n))
    seen = {ident}
    frontier = [ident]
    while frontier:
        nxt = []
        for m in frontier:
            for g in mats:
                prod_rows = tuple(
                    tuple(sum(m[i][k] * g[k][j] for k in range(n)) % p for j in range(n))
                    for i in range(n)
                )
                if prod_rows not in seen:
                    seen.add(prod_rows)
                    nxt.append(prod_rows)
                    if len(seen) > budget:
                        raise TooLarge("closure exceeds budget")
        frontier = nxt
    return seen


def generators_O(form: ElementaryForm):
    """A generating set whose closure has cardinality order_O(form)."""
    p, n = form.p, form.dim
    if n == 0:
        return []
    target = order_O(form)
    if p != 2 and n == 1:
        return [FormIsometry(form, [[p - 1]])]
    tally = classify(form)
    if form.kind == "bilinear" and tally == {"ubar": 0, "wbar": 2}:
        # the swap of the two generators and the kernel reflection R_z coincide
        z = oddity_vector(form)
        t = transvection(form, z)
        return [t, FormIsometry(form, t.matrix)]
    if target == 1:
        return []
    if target > GROUP_BUDGET:
        raise TooLarge("order %d exceeds the generator-search budget" % target)
    elems = sorted(enumerate_O(form, bound=max(ENUM_BOUND, p ** n)), key=lambda f: f.matrix)
    gens = []
    current = None
    for f in elems:
        if _is_identity(f.matrix):
            continue
        if current is not None and f.matrix in current:
            continue
        gens.append(f)
        current = _close([g.matrix for g in gens], p)
        if len(current) == target:
            return gens
    raise FormError("generator search failed to reach the full group")


def _is_identity(mat):
    return all(x == (1 if i == j else 0) for i, row in enumerate(mat) for j, x in enumerate(row))
