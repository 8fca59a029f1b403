#########################################################################################
# Effective relay SNRs and the end-to-end SNR at the destination.
# Works element-wise, so a realization may hold scalars or whole blocks of trials.
#########################################################################################
from dataclasses import dataclass
from typing import List

from core.fading import FadingRealization, Value
from core.model import DESTINATION, SOURCE, Scheme, relay
from infra.error_handler import ModelError


@dataclass(frozen=True)
class EffectiveSnrVector:
    a: List[Value]
    gamma_e2e: Value


def af_combine(a: Value, g: Value) -> Value:
    """A*g/(A+g+1): the SNR of an amplify-and-forward hop fed by an SNR-A relay."""
    return a * g / (a + g + 1.0)


def _combining_weight(m: int, scheme: Scheme) -> float:
    if m < 1:
        raise ModelError(f"symbol count must be >= 1, got {m}")
    return 1.0 / m if scheme.power_split else 1.0


#########################################################################################
# A_r in ascending relay order; overheard copies from R_1..R_{r-1} are added
# only when the scheme overhears.
#########################################################################################
def relay_effective_snrs(real: FadingRealization, m: int, scheme: Scheme) -> List[Value]:
    weight = _combining_weight(m, scheme)
    effective: List[Value] = []
    for r in range(1, real.n_relays + 1):
        a_r = real.snr(SOURCE, relay(r))
        if scheme.overhearing:
            for i in range(1, r):
                a_r = a_r + weight * af_combine(effective[i - 1], real.snr(relay(i), relay(r)))
        effective.append(a_r)
    return effective


def _combine_at_destination(real: FadingRealization, effective: List[Value], weight: float) -> Value:
    gamma = real.snr(SOURCE, DESTINATION)
    for r, a_r in enumerate(effective, start=1):
        gamma = gamma + weight * af_combine(a_r, real.snr(relay(r), DESTINATION))
    return gamma


def end_to_end_snr(real: FadingRealization, m: int, scheme: Scheme) -> Value:
    effective = relay_effective_snrs(real, m, scheme)
    return _combine_at_destination(real, effective, _combining_weight(m, scheme))


def effective_snr_vector(real: FadingRealization, m: int, scheme: Scheme) -> EffectiveSnrVector:
    effective = relay_effective_snrs(real, m, scheme)
    return EffectiveSnrVector(effective, _combine_at_destination(real, effective, _combining_weight(m, scheme)))
