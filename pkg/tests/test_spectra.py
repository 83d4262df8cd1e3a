import math

import numpy as np
import pytest

from dirmoment.arith import euler_phi, phi_star
from dirmoment.chargroup import build_group, classify
from dirmoment.kernel import KernelConfig
from dirmoment.lfunc import abc_values, kernel_weights
from dirmoment.spectra import (all_char_sums, bc_moments, compute_spectrum,
                               fourth_moment, parity_flat, primitive_flat,
                               weight_table)

CFG = KernelConfig()


# ---------------------------------------------------------------------------
# vectorized classification grids


@pytest.mark.parametrize("q", [1, 2, 3, 4, 8, 12, 15, 16, 45, 96, 105, 120])
def test_flat_grids_match_classify(q):
    G = build_group(q)
    par = parity_flat(G)
    prim = primitive_flat(G)
    assert par.shape == (G.group_order,)
    assert prim.shape == (G.group_order,)
    for i, chi in enumerate(G.labels()):
        p, _, is_prim = classify(G, chi)
        assert par[i] == p
        assert prim[i] == is_prim


# ---------------------------------------------------------------------------
# residue tables


def test_weight_table_segments_add_up():
    G = build_group(15)
    kw = kernel_weights(15, CFG)
    for parity in (0, 1):
        tb = weight_table(G, parity, "B", CFG, weights=kw)
        tc = weight_table(G, parity, "C", CFG, weights=kw)
        ta = weight_table(G, parity, "A", CFG, weights=kw)
        assert np.allclose(tb.weights + tc.weights, ta.weights,
                           rtol=0, atol=1e-12)
        assert tb.parity == parity


def test_weight_table_mass_is_coprime_pair_sum():
    # summing the table over residues must reproduce the plain double sum
    # over coprime pairs, independently of the residue bucketing
    q = 12
    G = build_group(q)
    kw = kernel_weights(q, CFG)
    for parity in (0, 1):
        ta = weight_table(G, parity, "A", CFG, weights=kw)
        direct = 0.0
        kp = kw.kprod[parity]
        for a in range(1, kw.m_eff + 1):
            if math.gcd(a, q) != 1:
                continue
            for b in range(1, kw.m_eff // a + 1):
                if math.gcd(b, q) != 1:
                    continue
                direct += kp[a * b] / 1.0
        assert np.sum(ta.weights) == pytest.approx(direct, rel=1e-12)


def test_transform_fft_matches_naive():
    for q in (5, 8, 15, 16, 105):
        G = build_group(q)
        kw = kernel_weights(q, CFG)
        tb = weight_table(G, 0, "B", CFG, weights=kw)
        f = all_char_sums(G, tb, "fft")
        n = all_char_sums(G, tb, "naive")
        assert np.max(np.abs(f - n)) < 1e-12


def test_transform_principal_row_is_total_mass():
    # the principal character sums the table with unit coefficients
    q = 21
    G = build_group(q)
    kw = kernel_weights(q, CFG)
    ta = weight_table(G, 0, "A", CFG, weights=kw)
    vals = all_char_sums(G, ta, "naive")
    i0 = G.label_index(G.principal())
    assert vals[i0].real == pytest.approx(float(np.sum(ta.weights)),
                                          rel=1e-12)
    assert abs(vals[i0].imag) < 1e-12


# ---------------------------------------------------------------------------
# spectrum pipeline vs. per-character pipeline


@pytest.mark.parametrize("q", [1, 2, 3, 4, 5, 8, 9, 12, 15, 16, 21, 24, 45])
def test_spectrum_matches_per_character(q):
    G = build_group(q)
    kw = kernel_weights(q, CFG)
    spec = compute_spectrum(q, CFG, weights=kw, group=G)
    for i, chi in enumerate(G.labels()):
        cv = abc_values(G, chi, CFG, weights=kw)
        assert spec.b_values[i] == pytest.approx(cv.b_value, rel=1e-10,
                                                 abs=1e-13)
        assert spec.c_values[i] == pytest.approx(cv.c_value, rel=1e-10,
                                                 abs=1e-13)


def test_spectrum_a_values_property():
    spec = compute_spectrum(15, CFG)
    assert np.allclose(spec.a_values, spec.b_values + spec.c_values,
                       rtol=0, atol=0)


def test_thread_determinism_bitwise():
    for q in (7, 45, 105):
        s1 = compute_spectrum(q, CFG, threads=1)
        s4 = compute_spectrum(q, CFG, threads=4)
        assert np.array_equal(s1.b_values, s4.b_values)
        assert np.array_equal(s1.c_values, s4.c_values)


def test_transform_method_equivalence_in_spectrum():
    for q in (8, 15):
        sf = compute_spectrum(q, CFG, method="fft")
        sn = compute_spectrum(q, CFG, method="naive")
        assert np.max(np.abs(sf.b_values - sn.b_values)) < 1e-12
        assert np.max(np.abs(sf.c_values - sn.c_values)) < 1e-12


# ---------------------------------------------------------------------------
# moment report


def test_moment_report_consistency():
    q = 15
    rep = fourth_moment(q, CFG)
    spec = compute_spectrum(q, CFG)
    prim = spec.primitive
    a = spec.a_values
    assert rep.phi_star == phi_star(q)
    assert rep.fourth_moment == pytest.approx(
        4.0 * float(np.sum(a[prim] ** 2)), rel=1e-14)
    assert rep.cross_bound >= abs(rep.cross_term) - 1e-15
    assert rep.c_moment_all >= rep.c_moment_primitive
    decomposition = 4.0 * (rep.b_moment + 2.0 * rep.cross_term
                           + rep.c_moment_primitive)
    assert rep.fourth_moment == pytest.approx(decomposition, rel=1e-12)


def test_moment_positive_and_ratio():
    for q in (3, 4, 5, 8):
        rep = fourth_moment(q, CFG)
        assert rep.fourth_moment > 0
        assert rep.main_term > 0
        assert rep.ratio == rep.fourth_moment / rep.main_term
        assert rep.imag_residue < 1e-12


def test_bc_moments_wrapper():
    q = 12
    rep = fourth_moment(q, CFG)
    b2, c2 = bc_moments(q, CFG)
    assert b2 == rep.b_moment
    assert c2 == rep.c_moment_all


def test_weights_mismatch_rejected():
    kw = kernel_weights(5, CFG)
    with pytest.raises(ValueError):
        compute_spectrum(7, CFG, weights=kw)


def test_spectrum_q1_and_q2_edge_cases():
    # q = 1: one (principal, primitive) character; q = 2: one character,
    # primitive count zero
    s1 = compute_spectrum(1, CFG)
    assert s1.b_values.shape == (1,)
    assert bool(s1.primitive[0]) is True
    assert phi_star(2) == 0
    rep2 = fourth_moment(2, CFG)
    assert rep2.fourth_moment == 0.0
    assert euler_phi(2) == 1
