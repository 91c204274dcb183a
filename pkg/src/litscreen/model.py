"""L2-regularized binary logistic regression.

The relevance model p(r|d) = sigmoid(w . x + b). Training minimizes mean
logistic loss plus (lambda/2) ||w||^2 (bias unregularized) with a
deterministic full-batch quasi-Newton solver started from zeros, so
retraining on identical data reproduces identical weights.
"""

from __future__ import annotations

import json
from dataclasses import dataclass
from pathlib import Path

import numpy as np
import scipy.optimize
import scipy.sparse as sp
from scipy.special import expit

PROBA_EPS = 1e-12
MODEL_FORMAT_VERSION = 1


class DegenerateTrainingError(ValueError):
    """Training set contains a single class; callers must guard (see seeding rules)."""


@dataclass
class Classifier:
    weights: np.ndarray
    bias: float
    lam: float
    converged: bool
    iterations_used: int

    @property
    def n_features(self) -> int:
        return self.weights.shape[0]


def _scores(X, w: np.ndarray, b: float) -> np.ndarray:
    z = X @ w
    if sp.issparse(z):  # never for csr @ dense vector, kept for safety
        z = np.asarray(z.todense()).ravel()
    return np.asarray(z).ravel() + b


def loss_and_grad(params: np.ndarray, X, y: np.ndarray, lam: float) -> tuple[float, np.ndarray]:
    """Mean logistic loss + (lam/2)||w||^2 and its gradient in (w, b)."""
    w = params[:-1]
    b = params[-1]
    m = X.shape[0]
    z = _scores(X, w, b)
    # log(1 + exp(-y~ z)) with y~ in {-1, +1}, stable via logaddexp
    signed = np.where(y == 1, -z, z)
    loss = float(np.mean(np.logaddexp(0.0, signed))) + 0.5 * lam * float(w @ w)

    p = expit(z)
    residual = (p - y) / m
    grad_w = X.T @ residual
    if sp.issparse(grad_w):
        grad_w = np.asarray(grad_w.todense()).ravel()
    grad_w = np.asarray(grad_w).ravel() + lam * w
    grad_b = float(residual.sum())
    return loss, np.concatenate([grad_w, [grad_b]])


def train(
    X,
    y,
    lam: float = 1.0,
    tol: float = 1e-6,
    max_iter: int = 1000,
) -> Classifier:
    """Fit the classifier; stops when max|gradient| <= tol or at max_iter."""
    y = np.asarray(y, dtype=np.float64).ravel()
    if X.shape[0] != y.shape[0]:
        raise ValueError(f"features have {X.shape[0]} rows but labels have {y.shape[0]}")
    classes = np.unique(y)
    if not np.all(np.isin(classes, (0.0, 1.0))):
        raise ValueError("labels must be binary 0/1")
    if classes.size < 2:
        raise DegenerateTrainingError(
            "training set contains a single class; screening seeds must include both"
        )
    if not sp.issparse(X):
        X = np.asarray(X, dtype=np.float64)
        if not np.all(np.isfinite(X)):
            raise ValueError("feature rows must be finite")

    p = X.shape[1]
    x0 = np.zeros(p + 1, dtype=np.float64)
    result = scipy.optimize.minimize(
        loss_and_grad,
        x0,
        args=(X, y, float(lam)),
        method="L-BFGS-B",
        jac=True,
        options={"maxiter": int(max_iter), "gtol": float(tol), "ftol": 1e-16},
    )
    params = result.x
    grad_ok = bool(np.max(np.abs(result.jac)) <= tol) if result.jac is not None else False
    return Classifier(
        weights=params[:-1].copy(),
        bias=float(params[-1]),
        lam=float(lam),
        converged=bool(result.success or grad_ok),
        iterations_used=int(result.nit),
    )


def predict_proba(clf: Classifier, X) -> np.ndarray:
    """p(r|d) per row, clamped away from exact 0 and 1."""
    if X.shape[1] != clf.n_features:
        raise ValueError(f"expected {clf.n_features} features, got {X.shape[1]}")
    probs = expit(_scores(X, clf.weights, clf.bias))
    return np.clip(probs, PROBA_EPS, 1.0 - PROBA_EPS)


def save_classifier(clf: Classifier, path: str | Path) -> None:
    payload = {
        "format_version": MODEL_FORMAT_VERSION,
        "weights": [float(w) for w in clf.weights],
        "bias": clf.bias,
        "lambda": clf.lam,
        "converged": clf.converged,
        "iterations_used": clf.iterations_used,
    }
    Path(path).write_text(json.dumps(payload, indent=2, sort_keys=True), encoding="utf-8")


def load_classifier(path: str | Path) -> Classifier:
    payload = json.loads(Path(path).read_text(encoding="utf-8"))
    if payload.get("format_version") != MODEL_FORMAT_VERSION:
        raise ValueError(f"unsupported classifier format version {payload.get('format_version')!r}")
    return Classifier(
        weights=np.asarray(payload["weights"], dtype=np.float64),
        bias=float(payload["bias"]),
        lam=float(payload["lambda"]),
        converged=bool(payload["converged"]),
        iterations_used=int(payload["iterations_used"]),
    )
