import math

import numpy as np
import pytest

import qnes


def test_sphere_reaches_target():
    log = qnes.run(qnes.make_benchmark("sphere", 5), algo="qnes", seed=1)
    assert log.termination == "target-reached"
    assert log.gaps[-1] <= 1e-20
    assert log.evaluations <= 5000


def test_same_seed_same_run():
    obj = qnes.make_benchmark("rosenbrock", 4)
    a = qnes.run(obj, seed=3)
    b = qnes.run(obj, seed=3)
    assert np.array_equal(a.gaps, b.gaps)


def test_python_objective():
    h = np.array([1.0, 10.0, 100.0])
    obj = qnes.objective(lambda x: 0.5 * float(x @ (h * x)), 3, f_star=0.0)
    log = qnes.run(obj, algo="hees", seed=2)
    assert log.termination == "target-reached"
    assert abs(np.linalg.det(log.final_A) - 1.0) < 1e-8


def test_csv_round_trip(tmp_path):
    log = qnes.run(qnes.make_benchmark("cigar", 3), seed=5)
    path = tmp_path / "cigar.csv"
    qnes.write_csv(log, path)
    back = qnes.read_csv(path)
    assert np.array_equal(back.gaps, log.gaps)
    assert path.read_text().splitlines()[0] == "iter,evals,gap,f_mean,sigma,det_err,R,step_type,eta,segment"


def test_rate_on_rosenbrock():
    stop = qnes.StoppingCriteria.defaults(10)
    stop.target_gap = 1e-100
    log = qnes.run(qnes.make_benchmark("rosenbrock", 10), seed=1, stop=stop)
    rate = qnes.summarize_rate(log)
    assert rate.max_factor > 1e3


def test_sym_exp_and_helpers():
    e = qnes.sym_exp(np.diag([math.log(2.0), -math.log(2.0)]))
    assert np.allclose(e, np.diag([2.0, 0.5]), atol=1e-14)
    assert qnes.chi_mean(4) == pytest.approx(1.880952380952381, rel=1e-14)
    assert max(qnes.switch_probabilities(0.3)) == 1.0


def test_invalid_input():
    with pytest.raises(ValueError):
        qnes.make_benchmark("nosuch", 3)
    with pytest.raises(ValueError):
        qnes.make_benchmark("sphere", 3)(np.zeros(2))
    with pytest.raises(ValueError):
        qnes.run(qnes.make_benchmark("sphere", 3), algo="cma")
    assert len(qnes.benchmark_names()) == 9
