"""Render a stencil as plain text, LaTeX, a C expression or JSON."""

from __future__ import annotations

import enum
from fractions import Fraction

from pastdiff.stencil import Stencil

MINUS = "−"


class EmitFormat(str, enum.Enum):
    TEXT = "text"
    LATEX = "latex"
    C_EXPR = "c-expr"
    JSON = "json"


def derivative_label(k: int, latex: bool = False) -> str:
    if k <= 3:
        return "f" + "'" * k
    return f"f^{{({k})}}" if latex else f"f^({k})"


def _text_rational(q: Fraction) -> str:
    return str(q)


def _latex_rational(q: Fraction) -> str:
    if q.denominator == 1:
        return str(q.numerator)
    return rf"\frac{{{q.numerator}}}{{{q.denominator}}}"


def _c_rational(q: Fraction) -> str:
    if q.denominator == 1:
        return f"{q.numerator}.0"
    return f"({q.numerator}.0/{q.denominator}.0)"


def _argument(delta: Fraction, fmt: EmitFormat) -> str:
    if delta == 0:
        return "t"
    mag = abs(delta)
    if fmt is EmitFormat.TEXT:
        sign = "−" if delta < 0 else "+"
        step = "h" if mag == 1 else (f"{mag}h" if mag.denominator == 1 else f"({mag})h")
        return f"t{sign}{step}"
    sign = "-" if delta < 0 else "+"
    if fmt is EmitFormat.LATEX:
        step = "h" if mag == 1 else f"{_latex_rational(mag)}h"
    else:
        step = "h" if mag == 1 else f"{_c_rational(mag)}*h"
    return f"t {sign} {step}"


def _terms(stencil: Stencil, fmt: EmitFormat) -> str:
    parts = []
    for c, d in zip(stencil.coefficients, stencil.nodes.offsets):
        if c == 0:
            continue
        mag = abs(c)
        call = f"f({_argument(d, fmt)})"
        if fmt is EmitFormat.TEXT:
            body = call if mag == 1 else f"{_text_rational(mag)}·{call}"
            neg = MINUS
        elif fmt is EmitFormat.LATEX:
            body = call if mag == 1 else f"{_latex_rational(mag)} {call}"
            neg = "-"
        else:
            body = call if mag == 1 else f"{_c_rational(mag)}*{call}"
            neg = "-"
        if not parts:
            parts.append(f"{neg}{body}" if c < 0 else body)
        else:
            parts.append(f"{neg} {body}" if c < 0 else f"+ {body}")
    return " ".join(parts) if parts else "0"


def render_text(stencil: Stencil) -> str:
    k = stencil.k
    scale = "(1/h)" if k == 1 else f"(1/h^{k})"
    return f"{derivative_label(k)}(t) ≈ {scale}[ {_terms(stencil, EmitFormat.TEXT)} ]"


def render_latex(stencil: Stencil) -> str:
    k = stencil.k
    scale = r"\frac{1}{h}" if k == 1 else rf"\frac{{1}}{{h^{{{k}}}}}"
    body = _terms(stencil, EmitFormat.LATEX)
    return rf"{derivative_label(k, latex=True)}(t) \approx {scale} \left[ {body} \right]"


def render_c_expr(stencil: Stencil) -> str:
    """C expression in ``f``, ``t`` and ``h``; rationals stay as ``(p.0/q.0)``."""
    denom = "*".join(["h"] * stencil.k)
    return f"({_terms(stencil, EmitFormat.C_EXPR)})/({denom})"


def render(stencil: Stencil, fmt: EmitFormat | str) -> str:
    fmt = EmitFormat(fmt)
    if fmt is EmitFormat.TEXT:
        return render_text(stencil)
    if fmt is EmitFormat.LATEX:
        return render_latex(stencil)
    if fmt is EmitFormat.C_EXPR:
        return render_c_expr(stencil)
    return stencil.to_json()
