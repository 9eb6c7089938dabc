# -*- coding: utf-8 -*-

"""
Low-precision ADC receiver: a uniform b-bit quantizer applied separately to
real and imaginary parts, its Bussgang linearization, and the surrogate
covariance model that lets the rank-one coordinate machinery solve the
quantized detection problem unchanged.
"""

import attr
import numpy as np

from .covariance import dense_covariance, dense_inverse_logdet, trace_product
from .define import (DEFAULT_ADC_STEP, FORMULA_MODES, FORMULA_STANDARD,
                     FORMULA_LITERAL)
from .utils import ConfigError


FORMULA_ALIASES = {
    'standard': FORMULA_STANDARD,
    'paper': FORMULA_LITERAL,
    'literal': FORMULA_LITERAL,
}


def _formula_mode(value):
    return FORMULA_ALIASES.get(value, value)


def _optional_bits(value):
    if value is None:
        return None
    return tuple(int(b) for b in value)


@attr.s(frozen=True)
class QuantizerConfig(object):
    """
    b-bit uniform quantizer with step s_q. per_antenna_bits may be given
    for documentation, but only uniform resolution is supported.
    """
    bits = attr.ib(converter=int)
    step = attr.ib(default=DEFAULT_ADC_STEP, converter=float)
    formula_mode = attr.ib(default=FORMULA_STANDARD, converter=_formula_mode)
    per_antenna_bits = attr.ib(default=None, converter=_optional_bits)

    def __attrs_post_init__(self):
        if self.bits < 1:
            raise ConfigError('ADC resolution must be at least 1 bit')
        if not self.step > 0:
            raise ConfigError('quantizer step must be positive')
        if self.formula_mode not in FORMULA_MODES:
            raise ConfigError('formula_mode must be one of %s, got %r'
                              % (FORMULA_MODES, self.formula_mode))
        if self.per_antenna_bits is not None:
            if any(b != self.bits for b in self.per_antenna_bits):
                raise ConfigError(
                    'non-uniform per-antenna resolutions %r are not '
                    'supported: the column covariance model needs the same '
                    'bit depth on every antenna' % (self.per_antenna_bits,))

    @property
    def rho(self):
        """Distortion factor 2^(-2b)."""
        return 2.0 ** (-2 * self.bits)

    @property
    def num_levels(self):
        return 2 ** self.bits


def thresholds(cfg):
    """
    Thresholds r_z = (-2^(b-1) + z) s_q for z = 1, ..., 2^b - 1.
    """
    z = np.arange(1, cfg.num_levels)
    return (z - 2 ** (cfg.bits - 1)) * cfg.step


def levels(cfg):
    """
    Reconstruction level of each of the 2^b bins: r_z - s_q/2 for the bin
    (r_(z-1), r_z], and r_top + s_q/2 for the bin above the top threshold.
    """
    index = np.arange(cfg.num_levels)
    return (index - 2 ** (cfg.bits - 1) + 0.5) * cfg.step


def quantize_real(x, cfg):
    """
    Quantize real input(s); bins are closed on the right.

    @param x: Scalar or array.
    @type cfg: QuantizerConfig

    @return: Quantized value(s), same shape as x.
    """
    values = np.asarray(x, dtype=float)
    # side='left' picks the first threshold >= x, i.e. x in (r_(z-1), r_z]
    bins = np.searchsorted(thresholds(cfg), values, side='left')
    out = levels(cfg)[bins]
    if out.ndim == 0:
        return float(out)
    return out


def quantize_complex_matrix(received, cfg):
    """
    Q(Re Y) + i Q(Im Y), elementwise.
    """
    received = np.asarray(received, dtype=complex)
    return (quantize_real(received.real, cfg)
            + 1j * quantize_real(received.imag, cfg))


def _mode_gain(cfg):
    rho = cfg.rho
    if cfg.formula_mode == FORMULA_LITERAL:
        return rho
    return 1.0 - rho


def bussgang_covariance(sigma, cfg):
    """
    Covariance of the quantizer output.

    standard_bussgang: (1 - rho)^2 Sigma + rho (1 - rho) Diag(Sigma).
    paper_literal:     rho^2 Sigma + rho (1 - rho) Diag(Sigma).
    """
    rho = cfg.rho
    gain = _mode_gain(cfg)
    diagonal = np.diag(np.real(np.diag(sigma)))
    return gain ** 2 * sigma + rho * (1.0 - rho) * diagonal


@attr.s(frozen=True)
class SurrogateModel(object):
    """
    Sigma'(gamma) = g^2 Q Gamma Q^H + s_eff^2 I, expressed for the solver
    as scaled sequences g Q and a scalar noise floor.
    """
    sequences = attr.ib(repr=False)
    noise_floor = attr.ib()
    gain = attr.ib()


def quantized_objective_model(sequences, noise_var, sigma_hat_q, cfg):
    """
    Fold the diagonal distortion term into a scalar noise floor computed
    from the quantized sample covariance, so coordinate updates stay
    rank-one:

        s_eff^2 = g^2 s^2 + rho (1 - rho) mean(diag(Sigma_hat_q))

    with g = 1 - rho (standard) or g = rho (paper_literal).

    @rtype: SurrogateModel
    """
    rho = cfg.rho
    gain = _mode_gain(cfg)
    mean_power = float(np.mean(np.real(np.diag(sigma_hat_q))))
    noise_floor = gain ** 2 * noise_var + rho * (1.0 - rho) * mean_power
    return SurrogateModel(sequences=gain * np.asarray(sequences),
                          noise_floor=noise_floor,
                          gain=gain)


def quantized_objective(sequences, gamma, noise_var, sigma_hat_q, cfg):
    """
    log det Sigma_q + tr(Sigma_q^-1 Sigma_hat_q) with the exact Bussgang
    covariance Sigma_q of Sigma(gamma); used on validation paths.
    """
    sigma = dense_covariance(np.asarray(sequences, dtype=complex),
                             np.asarray(gamma, dtype=float), noise_var)
    inverse, logdet = dense_inverse_logdet(bussgang_covariance(sigma, cfg))
    return logdet + trace_product(inverse, sigma_hat_q)
