import numpy as np
import pytest

from core.fading import FadingRealization, block_stream, draw_realization
from core.model import Scheme, equal_split, forward_links
from core.snr import af_combine, effective_snr_vector, end_to_end_snr, relay_effective_snrs
from infra.error_handler import ModelError


def constant_realization(k: int, value: float) -> FadingRealization:
    return FadingRealization(k, {link: value for link in forward_links(k)})


def test_af_combine_hand_value():
    assert af_combine(3.0, 3.0) == pytest.approx(9.0 / 7.0)


def test_af_combine_is_below_both_inputs():
    a = np.array([0.1, 1.0, 50.0])
    g = np.array([20.0, 1.0, 0.5])
    assert np.all(af_combine(a, g) < np.minimum(a, g))


def test_no_relays_is_direct_link():
    real = constant_realization(0, 7.5)
    for scheme in Scheme:
        assert end_to_end_snr(real, 3, scheme) == pytest.approx(7.5)


def test_two_relays_single_symbol():
    real = constant_realization(2, 3.0)
    a2 = 3.0 + 9.0 / 7.0
    expected = 3.0 + 9.0 / 7.0 + af_combine(a2, 3.0)
    vector = effective_snr_vector(real, 1, Scheme.STNC_OHAF)
    assert vector.a == pytest.approx([3.0, a2])
    assert vector.gamma_e2e == pytest.approx(expected)


def test_two_relays_two_symbols_per_scheme():
    real = constant_realization(2, 3.0)
    ohaf_a2 = 3.0 + 0.5 * 9.0 / 7.0
    assert end_to_end_snr(real, 2, Scheme.STNC_OHAF) == pytest.approx(
        3.0 + 0.5 * 9.0 / 7.0 + 0.5 * af_combine(ohaf_a2, 3.0)
    )
    assert end_to_end_snr(real, 2, Scheme.STNC_AF) == pytest.approx(3.0 + 9.0 / 7.0)
    assert end_to_end_snr(real, 2, Scheme.TDMA_OH) == pytest.approx(end_to_end_snr(real, 1, Scheme.STNC_OHAF))


def test_af_relays_ignore_overheard_links():
    real = constant_realization(3, 2.0)
    assert relay_effective_snrs(real, 2, Scheme.STNC_AF) == [2.0, 2.0, 2.0]


def test_single_relay_schemes_agree():
    real = FadingRealization(1, {link: v for link, v in zip(forward_links(1), [4.0, 0.3, 9.0])})
    assert end_to_end_snr(real, 2, Scheme.STNC_OHAF) == pytest.approx(end_to_end_snr(real, 2, Scheme.STNC_AF))


@pytest.mark.parametrize("k", [2, 3, 4])
def test_overhearing_never_hurts(make_topology, k):
    topo = make_topology(k, m=2)
    real = draw_realization(topo, equal_split(100.0, k, 2), block_stream(4, k), size=10_000)
    ohaf = end_to_end_snr(real, 2, Scheme.STNC_OHAF)
    af = end_to_end_snr(real, 2, Scheme.STNC_AF)
    assert np.all(ohaf >= af)


def test_vectorised_matches_scalar(make_topology):
    topo = make_topology(2)
    real = draw_realization(topo, equal_split(30.0, 2, 1), block_stream(8, 0), size=5)
    gammas = end_to_end_snr(real, 1, Scheme.STNC_OHAF)
    for i in range(5):
        scalar = FadingRealization(2, {link: float(real[link][i]) for link in forward_links(2)})
        assert end_to_end_snr(scalar, 1, Scheme.STNC_OHAF) == pytest.approx(gammas[i])


def test_rejects_zero_symbols():
    with pytest.raises(ModelError):
        end_to_end_snr(constant_realization(1, 1.0), 0, Scheme.STNC_OHAF)


def test_overheard_relay_hand_value():
    # links: s->1, s->2, s->d, 1->2, 1->d, 2->d
    real = FadingRealization(2, {link: v for link, v in zip(forward_links(2), [3.0, 1.0, 1.0, 3.0, 1.0, 1.0])})
    assert relay_effective_snrs(real, 1, Scheme.STNC_OHAF) == pytest.approx([3.0, 16.0 / 7.0])


def test_single_relay_end_to_end_hand_value():
    real = FadingRealization(1, {link: v for link, v in zip(forward_links(1), [2.0, 1.0, 3.0])})
    assert end_to_end_snr(real, 1, Scheme.STNC_OHAF) == pytest.approx(2.0)


def test_af_combine_limits():
    assert af_combine(0.0, 5.0) == 0.0
    assert af_combine(0.0, 0.0) == 0.0
    assert af_combine(1e6, 5.0) == pytest.approx(4.99997, abs=1e-5)
    assert af_combine(2.0, 7.0) == af_combine(7.0, 2.0)


def _block(make_topology, k: int, seed: int) -> FadingRealization:
    topo = make_topology(k, m=2, variance=1.5)
    return draw_realization(topo, equal_split(60.0, k, 2), block_stream(seed, 0), size=2000)


@pytest.mark.parametrize("scheme", list(Scheme))
@pytest.mark.parametrize("k", [2, 3])
def test_raising_any_link_never_lowers_gamma(make_topology, scheme, k):
    real = _block(make_topology, k, 30 + k)
    base = end_to_end_snr(real, 2, scheme)
    for link in forward_links(k):
        raised = dict(real.link_snr)
        raised[link] = raised[link] * 1.7 + 0.1
        gamma = end_to_end_snr(FadingRealization(k, raised), 2, scheme)
        assert np.all(gamma >= base * (1.0 - 1e-12))


@pytest.mark.parametrize("scheme", list(Scheme))
def test_scaling_all_links_raises_gamma(make_topology, scheme):
    real = _block(make_topology, 3, 40)
    base = end_to_end_snr(real, 2, scheme)
    scaled = FadingRealization(3, {link: 1.25 * v for link, v in real.link_snr.items()})
    assert np.all(end_to_end_snr(scaled, 2, scheme) > base)


@pytest.mark.parametrize("scheme", list(Scheme))
@pytest.mark.parametrize("k", [1, 2, 4])
def test_gamma_bounded_by_weakest_hops(make_topology, scheme, k):
    real = _block(make_topology, k, 50 + k)
    weight = 1.0 if scheme is Scheme.TDMA_OH else 0.5
    vector = effective_snr_vector(real, 2, scheme)
    bound = real.snr("s", "d")
    for r, a_r in enumerate(vector.a, start=1):
        bound = bound + weight * np.minimum(a_r, real.snr(str(r), "d"))
    assert np.all(vector.gamma_e2e <= bound * (1.0 + 1e-12))
    assert np.all(vector.gamma_e2e >= real.snr("s", "d"))
