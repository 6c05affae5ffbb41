"""Adam with bias correction."""

from typing import List, Tuple

import numpy as np

from .models import AdamState, NetworkParams


def adam_step(
    params: NetworkParams,
    grads: Tuple[List[np.ndarray], List[np.ndarray]],
    state: AdamState,
) -> Tuple[NetworkParams, AdamState]:
    """One Adam update; inputs are left untouched."""
    cfg = state.config
    grad_arrays = [*grads[0], *grads[1]]
    if len(grad_arrays) != len(state.m):
        raise ValueError(f"Got {len(grad_arrays)} gradient arrays for {len(state.m)} parameter arrays")

    step = state.step + 1
    correction1 = 1.0 - cfg.beta1**step
    correction2 = 1.0 - cfg.beta2**step
    updated, new_m, new_v = [], [], []
    for value, g, m, v in zip(params.arrays(), grad_arrays, state.m, state.v):
        if g.shape != value.shape:
            raise ValueError(f"Gradient shape {g.shape} does not match parameter shape {value.shape}")
        m = cfg.beta1 * m + (1.0 - cfg.beta1) * g
        v = cfg.beta2 * v + (1.0 - cfg.beta2) * g * g
        m_hat = m / correction1
        v_hat = v / correction2
        updated.append(value - cfg.alpha * m_hat / (np.sqrt(v_hat) + cfg.epsilon))
        new_m.append(m)
        new_v.append(v)

    n = len(params.weights)
    return (
        NetworkParams(updated[:n], updated[n:]),
        AdamState(m=new_m, v=new_v, step=step, config=cfg),
    )
