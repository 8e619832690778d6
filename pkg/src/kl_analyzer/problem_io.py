"""Problem-definition files.

A problem is a JSON document:

    {
      "kind": "smooth" | "max" | "l1" | "lp" | "staircase",
      "dimension": n,
      "xbar": [ ... n numbers ... ],
      "theta": 0.5,                      # optional, default 0.5
      <class payload, see below>
    }

Class payloads (numbers are decimal, parsed as 64-bit floats):

    "smooth": {"quadratic": {"Q": [[...]], "c": [...], "d": 0.0}}
              or {"polynomial": {"terms": [{"coeff": c, "exponents": [e...]}],
                                 "abs_terms": [{"coeff": c, "index": i,
                                                "power": q}]}}
    "max":    [ <smooth payload>, ... ]          # nonempty
    "l1":     {"smooth": <smooth payload>, "mu": mu}
    "lp":     {"A": [[...]], "b": [...], "mu": mu, "p": p}
    "staircase": {}                              # 1-D test fixture

The staircase kind exists for the sampling oracle only; it carries no
analytic certificate.
"""

import hashlib
import json
import math
from dataclasses import dataclass

import numpy as np

from .errors import ProblemFormatError
from .model import (
    KLQuery,
    L1Regularized,
    LpLeastSquares,
    MaxOfSmooth,
    PolynomialOracle,
    Quadratic,
    Smooth,
    Staircase1D,
)

KINDS = ("smooth", "max", "l1", "lp", "staircase")


@dataclass(frozen=True)
class Problem:
    function: object
    xbar: np.ndarray
    theta: float
    kind: str
    digest: str

    def query(self, radius_eps=0.1, level_nu=math.inf):
        return KLQuery(self.function, self.xbar, self.theta, radius_eps, level_nu)


def _require(cond, msg):
    if not cond:
        raise ProblemFormatError(msg)


def _parse_smooth_payload(payload, dimension, where):
    _require(isinstance(payload, dict), "%s: smooth payload must be an object" % where)
    if "quadratic" in payload:
        body = payload["quadratic"]
        _require(isinstance(body, dict) and "Q" in body, "%s: quadratic needs a Q matrix" % where)
        q = np.asarray(body["Q"], dtype=np.float64)
        _require(q.shape == (dimension, dimension), "%s: Q must be %dx%d" % (where, dimension, dimension))
        c = np.asarray(body.get("c", [0.0] * dimension), dtype=np.float64)
        _require(c.shape == (dimension,), "%s: c must have length %d" % (where, dimension))
        return Quadratic(q, c, float(body.get("d", 0.0)))
    if "polynomial" in payload:
        body = payload["polynomial"]
        _require(isinstance(body, dict) and "terms" in body, "%s: polynomial needs terms" % where)
        terms = []
        for t in body["terms"]:
            _require(
                isinstance(t, dict) and "coeff" in t and "exponents" in t,
                "%s: each term needs coeff and exponents" % where,
            )
            terms.append((float(t["coeff"]), [int(e) for e in t["exponents"]]))
        abs_terms = []
        for t in body.get("abs_terms", []):
            _require(
                isinstance(t, dict) and {"coeff", "index", "power"} <= set(t),
                "%s: each abs term needs coeff, index, power" % where,
            )
            abs_terms.append((float(t["coeff"]), int(t["index"]), float(t["power"])))
        return PolynomialOracle(dimension, terms, abs_terms)
    raise ProblemFormatError("%s: smooth payload needs 'quadratic' or 'polynomial'" % where)


def parse_problem(text, digest_source=None):
    """Parse problem JSON text into a Problem.

    Raises ProblemFormatError with position information on malformed
    JSON and with a field path on schema violations.
    """
    try:
        doc = json.loads(text)
    except json.JSONDecodeError as exc:
        raise ProblemFormatError(
            "malformed JSON at byte offset %d (line %d, column %d): %s"
            % (exc.pos, exc.lineno, exc.colno, exc.msg)
        ) from exc
    _require(isinstance(doc, dict), "problem document must be a JSON object")
    kind = doc.get("kind")
    _require(kind in KINDS, "kind must be one of %s" % (KINDS,))
    _require("dimension" in doc, "dimension is required")
    dimension = int(doc["dimension"])
    _require(dimension >= 1, "dimension must be at least 1")
    _require("xbar" in doc, "xbar is required")
    xbar = np.asarray(doc["xbar"], dtype=np.float64)
    _require(xbar.shape == (dimension,), "xbar must have length %d" % dimension)
    theta = float(doc.get("theta", 0.5))
    _require(0.0 <= theta < 1.0, "theta must lie in [0, 1)")

    if kind == "smooth":
        _require("smooth" in doc, "smooth problems need a 'smooth' payload")
        function = Smooth(_parse_smooth_payload(doc["smooth"], dimension, "smooth"))
    elif kind == "max":
        _require(
            isinstance(doc.get("max"), list) and doc["max"], "max problems need a nonempty 'max' list"
        )
        members = tuple(
            _parse_smooth_payload(p, dimension, "max[%d]" % i) for i, p in enumerate(doc["max"])
        )
        function = MaxOfSmooth(members)
    elif kind == "l1":
        body = doc.get("l1")
        _require(isinstance(body, dict) and "smooth" in body and "mu" in body, "l1 needs smooth and mu")
        function = L1Regularized(
            _parse_smooth_payload(body["smooth"], dimension, "l1.smooth"), float(body["mu"])
        )
    elif kind == "lp":
        body = doc.get("lp")
        _require(
            isinstance(body, dict) and {"A", "b", "mu", "p"} <= set(body),
            "lp needs A, b, mu and p",
        )
        a = np.asarray(body["A"], dtype=np.float64)
        _require(a.ndim == 2 and a.shape[1] == dimension, "lp A must have %d columns" % dimension)
        function = LpLeastSquares(a, np.asarray(body["b"], dtype=np.float64), float(body["mu"]), float(body["p"]))
    else:
        _require(dimension == 1, "the staircase fixture is one-dimensional")
        function = Staircase1D()

    raw = text.encode() if digest_source is None else digest_source
    digest = "sha256:" + hashlib.sha256(raw).hexdigest()
    return Problem(function, xbar, theta, kind, digest)


def load_problem(path):
    with open(path, "rb") as fh:
        raw = fh.read()
    try:
        text = raw.decode("utf-8")
    except UnicodeDecodeError as exc:
        raise ProblemFormatError("problem file is not valid UTF-8: %s" % exc) from exc
    return parse_problem(text, digest_source=raw)
