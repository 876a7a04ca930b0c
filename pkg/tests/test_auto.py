import math

import numpy as np
import pytest

from crmc import (
    AutoConfig,
    FLAG_EPSILON_ORDER,
    FLAG_EXACT_MODE,
    RngStream,
    auto_integrate,
    auto_integrate_queue,
    c_hat_for,
    cos100,
    logsing,
    prepare_phase1,
    required_samples,
)


def test_c_hat_frozen(scheme_r2, scheme_r4):
    # frozen from tools/oracle_scheme_constants.py
    assert c_hat_for(scheme_r2) == pytest.approx(9.88211768802618541, rel=1e-12)
    assert c_hat_for(scheme_r4) == pytest.approx(18.1223734037692903, rel=1e-12)


def test_required_samples_formula(scheme_r2):
    lt, eps, delta = 781.342, 1e-3, 0.05
    want = int(
        (c_hat_for(scheme_r2) * lt * math.sqrt(math.log(2 / delta)) / eps) ** 0.4
    )
    assert required_samples(lt, eps, delta, scheme_r2) == want
    # overriding the constant scales the answer down; no clamping here
    assert required_samples(lt, eps, delta, scheme_r2, c_hat=1e-12) == 0


def test_required_samples_zero_l_tilde(scheme_r2):
    assert required_samples(0.0, 1e-3, 0.05, scheme_r2) == 3


def test_required_samples_validation(scheme_r2):
    with pytest.raises(ValueError):
        required_samples(-1.0, 1e-3, 0.05, scheme_r2)
    with pytest.raises(ValueError):
        required_samples(1.0, 0.0, 0.05, scheme_r2)
    with pytest.raises(ValueError):
        required_samples(1.0, 1e-3, 1.5, scheme_r2)


def test_config_validation():
    with pytest.raises(ValueError):
        AutoConfig(epsilon=0.0, delta=0.05)
    with pytest.raises(ValueError):
        AutoConfig(epsilon=1e-3, delta=1.0)
    with pytest.raises(ValueError):
        AutoConfig(epsilon=1e-3, delta=0.05, kappa=1.0)
    with pytest.raises(ValueError):
        AutoConfig(epsilon=1e-3, delta=0.05, delta_reg=-1.0)
    with pytest.raises(ValueError):
        AutoConfig(epsilon=1e-3, delta=0.05, c_hat=0.0)


def test_exact_mode_on_low_degree_polynomial(scheme_r4):
    f = lambda x: np.asarray(x, dtype=float) ** 2
    cfg = AutoConfig(epsilon=1e-3, delta=0.05)
    rep = auto_integrate(f, scheme_r4, 0.0, 1.0, cfg, RngStream(3))
    assert FLAG_EXACT_MODE in rep.flags
    assert rep.N_epsilon == 5
    assert rep.m_final == 1
    assert rep.estimate == pytest.approx(1 / 3, abs=1e-13)


def test_deterministic_given_stream(scheme_r2):
    cfg = AutoConfig(epsilon=1e-2, delta=0.1)
    a = auto_integrate(np.exp, scheme_r2, 0.0, 1.0, cfg, RngStream(5, 7))
    b = auto_integrate(np.exp, scheme_r2, 0.0, 1.0, cfg, RngStream(5, 7))
    assert a.estimate == b.estimate
    assert a.N_epsilon == b.N_epsilon


def test_phase1_reuse_is_equivalent(scheme_r2):
    prob = logsing()
    cfg = AutoConfig(epsilon=1e-3, delta=0.05)
    ph1 = prepare_phase1(prob.f, scheme_r2, 0.0, 1.0, cfg)
    direct = auto_integrate(prob.f, scheme_r2, 0.0, 1.0, cfg, RngStream(8, 2))
    reused = auto_integrate(
        prob.f, scheme_r2, 0.0, 1.0, cfg, RngStream(8, 2), phase1=ph1
    )
    assert direct.estimate == reused.estimate
    assert direct.N_epsilon == reused.N_epsilon
    assert direct.m_phase1 == reused.m_phase1
    assert direct.m_final == reused.m_final
    assert direct.evaluation_count == reused.evaluation_count


def test_phase1_mismatch_rejected(scheme_r2, scheme_r4):
    cfg = AutoConfig(epsilon=1e-2, delta=0.1)
    ph1 = prepare_phase1(np.exp, scheme_r2, 0.0, 1.0, cfg)
    with pytest.raises(ValueError, match="phase1"):
        auto_integrate(np.exp, scheme_r4, 0.0, 1.0, cfg, RngStream(1), phase1=ph1)
    with pytest.raises(ValueError, match="phase1"):
        auto_integrate(np.exp, scheme_r2, 0.0, 2.0, cfg, RngStream(1), phase1=ph1)


def test_meets_target_on_smooth_problem(scheme_r2):
    cfg = AutoConfig(epsilon=1e-2, delta=0.1)
    for k in range(20):
        rep = auto_integrate(np.exp, scheme_r2, 0.0, 1.0, cfg, RngStream(31, k))
        assert abs(rep.estimate - (math.e - 1)) <= 1e-2


def test_loose_epsilon_warns_but_holds(scheme_r2):
    cfg = AutoConfig(epsilon=1.0, delta=0.1)
    with pytest.warns(UserWarning, match="vacuous"):
        rep = auto_integrate(np.exp, scheme_r2, 0.0, 1.0, cfg, RngStream(2))
    assert abs(rep.estimate - (math.e - 1)) <= 1.0
    assert rep.N_epsilon >= 3


def test_epsilon_order_anomaly_flagged(scheme_r2):
    # an artificially tiny budget constant starves phase 2, whose threshold
    # then sits above the phase-1 threshold; the driver flags it and keeps
    # the phase-1 partition
    prob = logsing()
    cfg = AutoConfig(epsilon=1e-3, delta=0.05, c_hat=1e-9)
    rep = auto_integrate(prob.f, scheme_r2, 0.0, 1.0, cfg, RngStream(4))
    assert FLAG_EPSILON_ORDER in rep.flags
    assert rep.m_final == rep.m_phase1
    assert rep.epsilon_double_prime > rep.epsilon_prime


def test_zero_dd_warning(scheme_r3):
    # cubic that is exactly zero left of 1/2: left cells carry a vanishing
    # divided difference, which with delta_reg=0 deserves a warning
    f = lambda x: np.maximum(np.asarray(x, dtype=float) - 0.5, 0.0) ** 3
    cfg = AutoConfig(epsilon=1e-4, delta=0.1)
    with pytest.warns(UserWarning, match="zero"):
        auto_integrate(f, scheme_r3, 0.0, 1.0, cfg, RngStream(6))


def test_report_threshold_fields(scheme_r2):
    prob = logsing()
    cfg = AutoConfig(epsilon=1e-3, delta=0.05)
    rep = auto_integrate(prob.f, scheme_r2, 0.0, 1.0, cfg, RngStream(9))
    assert rep.epsilon_prime == pytest.approx(1e-3**0.5)
    assert rep.epsilon_double_prime == pytest.approx(
        rep.l_tilde_value * rep.m_epsilon ** -3.0
    )
    assert rep.m_final >= rep.m_phase1
    assert rep.n_epsilon > 0
    assert rep.evaluation_count > 0


def test_queue_variant_agrees_at_r2(scheme_r2):
    prob = cos100()
    cfg = AutoConfig(epsilon=1e-3, delta=0.05)
    rec = auto_integrate(prob.f, scheme_r2, 0.0, 1.0, cfg, RngStream(14))
    que = auto_integrate_queue(prob.f, scheme_r2, 0.0, 1.0, cfg, RngStream(14))
    assert abs(que.N_epsilon - rec.N_epsilon) <= 0.15 * rec.N_epsilon
    assert abs(que.estimate - rec.estimate) <= 2e-3
