"""On-resonance added-noise budgets for both conversion directions.

Two families of models are provided.  The ideal forms assume lossless
cavities in the resolved-sideband regime with perfect optical mode
matching; the lossy forms fold in sideband gain, internal cavity loss
(external/total linewidth ratios), mode matching, the peak-efficiency
cap, and the locking-beam backaction product.  Every lossy form reduces
exactly to its ideal counterpart when all loss and gain factors are set
to one and the locking term is zero.

Port occupancies entering the motional terms include the backaction
limits: n_em = n_bar_e + n_min_e and n_om = n_bar_o + n_min_o.  In the
resolved-sideband limit the n_min contributions vanish and these reduce
to the bare occupancies.
"""

from __future__ import annotations

from .core import (
    DeviceParams,
    NoiseBudget,
    NoiseEnvironment,
    OperatingPoint,
    assemble_budget,
    total_damping,
)

MODEL_IDEAL_UP = "ideal_up"
MODEL_IDEAL_DOWN = "ideal_down"
MODEL_IDEAL_DOWN_COMBINED = "ideal_down_combined"
MODEL_LOSSY_UP = "lossy_up"
MODEL_LOSSY_DOWN = "lossy_down"

MODEL_KINDS = (
    MODEL_IDEAL_UP,
    MODEL_IDEAL_DOWN,
    MODEL_IDEAL_DOWN_COMBINED,
    MODEL_LOSSY_UP,
    MODEL_LOSSY_DOWN,
)


def n_bar_e(env: NoiseEnvironment, gamma_e: float) -> float:
    """Microwave circuit occupancy at a given electromechanical rate,
    linear model a_e * gamma_e + b_e."""
    value = env.a_e * gamma_e + env.b_e
    if value < 0.0:
        raise ValueError(
            f"occupancy model gives negative n_bar_e = {value:.4g} at "
            f"gamma_e = {gamma_e:.4g} rad/s; coefficients are invalid there"
        )
    return value


def _require_positive(name: str, value: float):
    if value <= 0.0:
        raise ValueError(f"{name} must be positive here (division), got {value}")


def _occupancies(params: DeviceParams, env: NoiseEnvironment, gamma_e: float):
    nbe = n_bar_e(env, gamma_e)
    n_em = nbe + params.n_min_e
    n_om = env.n_bar_o + params.n_min_o
    return nbe, n_em, n_om


def n_add_up_ideal(
    params: DeviceParams, op: OperatingPoint, env: NoiseEnvironment
) -> NoiseBudget:
    """Upconversion added noise, lossless resolved-sideband form.

    Motional: thermal/Gamma_e + n_em + n_om Gamma_o / Gamma_e.
    Electromagnetic: n_bar_o Gamma_T^2 / (Gamma_e Gamma_o).
    Correlation (subtracted): 2 n_bar_o Gamma_T / Gamma_e.
    """
    _require_positive("gamma_e", op.gamma_e)
    _require_positive("gamma_o", op.gamma_o)
    gamma_t = total_damping(params, op)
    _, n_em, n_om = _occupancies(params, env, op.gamma_e)
    motional = env.n_th_gamma_m / op.gamma_e + n_em + n_om * op.gamma_o / op.gamma_e
    electromagnetic = env.n_bar_o * gamma_t**2 / (op.gamma_e * op.gamma_o)
    correlation = 2.0 * env.n_bar_o * gamma_t / op.gamma_e
    return assemble_budget(motional, electromagnetic, correlation, "up")


def n_add_down_ideal(
    params: DeviceParams, op: OperatingPoint, env: NoiseEnvironment
) -> NoiseBudget:
    """Downconversion added noise, lossless resolved-sideband form.

    Mirror of :func:`n_add_up_ideal` under exchange of the two ports.
    """
    _require_positive("gamma_e", op.gamma_e)
    _require_positive("gamma_o", op.gamma_o)
    gamma_t = total_damping(params, op)
    nbe, n_em, n_om = _occupancies(params, env, op.gamma_e)
    motional = env.n_th_gamma_m / op.gamma_o + n_om + n_em * op.gamma_e / op.gamma_o
    electromagnetic = nbe * gamma_t**2 / (op.gamma_o * op.gamma_e)
    correlation = 2.0 * nbe * gamma_t / op.gamma_o
    return assemble_budget(motional, electromagnetic, correlation, "down")


def n_add_down_combined(
    params: DeviceParams, op: OperatingPoint, env: NoiseEnvironment
) -> NoiseBudget:
    """Downconversion added noise with the port terms combined.

    thermal/Gamma_o + n_om + n_bar_e Gamma_o / Gamma_e
    + n_min_e Gamma_e / Gamma_o.  Algebraically identical to
    :func:`n_add_down_ideal` whenever Gamma_T = Gamma_e + Gamma_o
    (negligible intrinsic loss in the total damping).  The last term is
    what limits the ratio Gamma_e / Gamma_o at high microwave drive.

    Grouping: the first two terms are reported as motional, the two
    occupancy terms as electromagnetic; the correlation slot is zero
    because the interference has been absorbed.
    """
    _require_positive("gamma_e", op.gamma_e)
    _require_positive("gamma_o", op.gamma_o)
    nbe = n_bar_e(env, op.gamma_e)
    motional = env.n_th_gamma_m / op.gamma_o + env.n_bar_o + params.n_min_o
    electromagnetic = (
        nbe * op.gamma_o / op.gamma_e + params.n_min_e * op.gamma_e / op.gamma_o
    )
    return assemble_budget(motional, electromagnetic, 0.0, "down")


def n_add_down_lossy(
    params: DeviceParams, op: OperatingPoint, env: NoiseEnvironment
) -> NoiseBudget:
    """Downconversion added noise with lossy cavities and finite sideband gain.

    Motional: (thermal + locking + n_om Gamma_o + n_em Gamma_e)
              / (A_o eps (k_o_ext/k_o) Gamma_o).
    Electromagnetic: n_bar_e (k_e_ext/k_e) Gamma_T^2
              / (A_e A_o eta_m Gamma_e Gamma_o).
    Correlation: 2 n_bar_e Gamma_T
              / (A_o eps sqrt(A_e) (k_o_ext/k_o) Gamma_o).
    """
    _require_positive("gamma_e", op.gamma_e)
    _require_positive("gamma_o", op.gamma_o)
    ratio_o = params.kappa_o_ext / params.kappa_o
    ratio_e = params.kappa_e_ext / params.kappa_e
    _require_positive("kappa_o_ext/kappa_o", ratio_o)
    _require_positive("kappa_e_ext/kappa_e", ratio_e)
    _require_positive("eps_mode", params.eps_mode)
    _require_positive("eta_m", params.eta_m)
    gamma_t = total_damping(params, op)
    nbe, n_em, n_om = _occupancies(params, env, op.gamma_e)

    denom_o = params.gain_o * params.eps_mode * ratio_o * op.gamma_o
    motional = (
        env.n_th_gamma_m
        + env.n_lock_gamma_lock
        + n_om * op.gamma_o
        + n_em * op.gamma_e
    ) / denom_o
    electromagnetic = (
        nbe * ratio_e * gamma_t**2 / (params.gain_total * params.eta_m * op.gamma_e * op.gamma_o)
    )
    correlation = 2.0 * nbe * gamma_t / (denom_o * params.gain_e**0.5)
    return assemble_budget(motional, electromagnetic, correlation, "down")


def n_add_up_lossy(
    params: DeviceParams, op: OperatingPoint, env: NoiseEnvironment
) -> NoiseBudget:
    """Upconversion added noise with lossy cavities, motional term only.

    (thermal + locking + n_em Gamma_e + n_om Gamma_o)
    / (A_e eps_e (k_e_ext/k_e) Gamma_e).  The electromagnetic and
    correlation terms are zero: the optical occupancy driving them is
    negligible with a well-filtered optical pump.  ``eps_e`` is the
    microwave-side extraction factor; no measurement pins it, so it
    defaults to 1 and is a config knob.
    """
    _require_positive("gamma_e", op.gamma_e)
    ratio_e = params.kappa_e_ext / params.kappa_e
    _require_positive("kappa_e_ext/kappa_e", ratio_e)
    _require_positive("eps_e", params.eps_e)
    _, n_em, n_om = _occupancies(params, env, op.gamma_e)
    denom_e = params.gain_e * params.eps_e * ratio_e * op.gamma_e
    motional = (
        env.n_th_gamma_m
        + env.n_lock_gamma_lock
        + n_em * op.gamma_e
        + n_om * op.gamma_o
    ) / denom_e
    return assemble_budget(motional, 0.0, 0.0, "up")


_EVALUATORS = {
    MODEL_IDEAL_UP: n_add_up_ideal,
    MODEL_IDEAL_DOWN: n_add_down_ideal,
    MODEL_IDEAL_DOWN_COMBINED: n_add_down_combined,
    MODEL_LOSSY_UP: n_add_up_lossy,
    MODEL_LOSSY_DOWN: n_add_down_lossy,
}


def evaluate(
    kind: str, params: DeviceParams, op: OperatingPoint, env: NoiseEnvironment
) -> NoiseBudget:
    """Evaluate the added-noise model named by ``kind``."""
    try:
        fn = _EVALUATORS[kind]
    except KeyError:
        raise ValueError(f"unknown noise model {kind!r}; one of {MODEL_KINDS}") from None
    return fn(params, op, env)
