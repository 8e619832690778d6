"""Machine-readable reports.

Reports serialize to JSON with a versioned schema tag.  Floats are
written with 17 significant digits so a round trip through the report
is exact; infinities appear as the string "inf" (JSON has no literal
for them).  Key order is fixed, so identical inputs give byte-identical
reports.
"""

import json
import math

SCHEMA = "kl-analyzer/1"
AGREEMENT_REL = 0.05
AGREEMENT_ABS = 0.02


def format_float(x):
    x = float(x)
    if math.isinf(x):
        return '"inf"' if x > 0 else '"-inf"'
    if math.isnan(x):
        return '"nan"'
    return format(x, ".17g")


def dumps(obj):
    """Deterministic JSON text: insertion-ordered keys, 17g floats."""
    out = []
    _emit(obj, out)
    return "".join(out)


def _emit(obj, out):
    if obj is None:
        out.append("null")
    elif obj is True:
        out.append("true")
    elif obj is False:
        out.append("false")
    elif isinstance(obj, float):
        out.append(format_float(obj))
    elif isinstance(obj, int):
        out.append(str(obj))
    elif isinstance(obj, str):
        out.append(json.dumps(obj))
    elif isinstance(obj, dict):
        out.append("{")
        for i, (k, v) in enumerate(obj.items()):
            if i:
                out.append(",")
            out.append(json.dumps(str(k)))
            out.append(":")
            _emit(v, out)
        out.append("}")
    elif isinstance(obj, (list, tuple)):
        out.append("[")
        for i, v in enumerate(obj):
            if i:
                out.append(",")
            _emit(v, out)
        out.append("]")
    else:
        try:
            seq = list(obj)
        except TypeError:
            raise TypeError("cannot serialize %r" % type(obj))
        _emit(seq, out)


def certificate_to_doc(cert):
    if cert is None:
        return None
    return {
        "verdict": cert.verdict,
        "modulus": float(cert.modulus),
        "sharp": bool(cert.sharp),
        "witness_w": None if cert.witness_w is None else [float(v) for v in cert.witness_w],
        "diagnostics": list(cert.diagnostics),
    }


def sweep_to_doc(sweep):
    if sweep is None:
        return None
    return {
        "lambdas": [float(v) for v in sweep.lambdas],
        "moduli": [float(v) for v in sweep.moduli],
        "limit_modulus": float(sweep.limit_modulus),
    }


def agreement_flag(certified, oracle):
    """|certified - oracle| <= max(0.05 * certified, 0.02) when both are
    finite; equal infinities agree; anything else does not."""
    if certified is None or oracle is None:
        return False
    if math.isinf(certified) or math.isinf(oracle):
        return math.isinf(certified) and math.isinf(oracle)
    band = max(AGREEMENT_REL * certified, AGREEMENT_ABS)
    return abs(certified - oracle) <= band


def build_report(
    command,
    digest,
    certificate=None,
    certificate_error=None,
    oracle_estimate=None,
    exponent_estimate=None,
    sweep=None,
    agreement=None,
    outputs=None,
    notes=(),
):
    doc = {
        "schema": SCHEMA,
        "command": command,
        "problem_digest": digest,
        "certificate": certificate_to_doc(certificate),
        "certificate_error": certificate_error,
        "oracle_estimate": None if oracle_estimate is None else float(oracle_estimate),
        "exponent_estimate": (
            None
            if exponent_estimate is None
            else {"theta_hat": float(exponent_estimate[0]), "r2": float(exponent_estimate[1])}
        ),
        "sweep": sweep_to_doc(sweep),
        "agreement": agreement,
        "outputs": dict(outputs or {}),
        "notes": list(notes),
    }
    return doc
