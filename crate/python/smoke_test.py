"""Smoke test for the pygrp extension module.

Build and run from the repository root:

    cargo build --release -p grp-python --features extension-module
    cp target/release/libpygrp.so python/pygrp.so
    python3 python/smoke_test.py
"""
import math
import os
import sys
import tempfile

sys.path.insert(0, os.path.dirname(os.path.abspath(__file__)))

import pygrp  # noqa: E402


def close(x, y, tol=1e-12):
    return abs(x - y) <= tol * max(1.0, abs(y))


def main():
    p = pygrp.WeibullParams.from_theta(1.0, 2.2)
    assert close(p.a, 1.0) and close(p.theta, 1.0)
    assert close(pygrp.WeibullParams(0.25, 2.0).theta, 2.0)
    f = pygrp.RestorationFactors(0.8, 0.3)

    assert pygrp.virtual_age_step(0.0, 0.5, 2.0) == 1.0
    ages = pygrp.trajectory([("CM", 1.0), ("PM", 2.0)], f)
    assert close(ages[0], 0.3) and close(ages[1], 1.9)

    one = pygrp.WeibullParams(1.0, 1.0)
    assert pygrp.event_log_likelihood(one, 0.0, "PM", 2.0) == -2.0
    assert close(
        pygrp.history_log_likelihood(
            pygrp.WeibullParams(1.0, 2.0),
            pygrp.RestorationFactors(0.0, 1.0),
            [[("CM", 1.0), ("CM", 1.0)]],
        ),
        3 * math.log(2) - 4,
    )
    assert close(pygrp.conditional_quantile(one, 0.0, 1 - math.exp(-1)), 1.0)

    history = pygrp.generate(p, f, 100, n_items=1, k_cm=1.0, seed=7)
    assert len(history) == 1 and len(history[0]) == 100
    assert history == pygrp.generate(p, f, 100, seed=7)

    with tempfile.TemporaryDirectory() as d:
        path = os.path.join(d, "h.csv")
        pygrp.write_csv(history, path)
        assert pygrp.read_csv(path) == history

    fit = pygrp.fit_mle(history, starts=2, population=300, seed=1)
    truth = pygrp.evaluate(p, f, history)
    assert fit.log_likelihood >= truth - 1e-3, (fit.log_likelihood, truth)
    assert close(pygrp.evaluate(fit.params, fit.factors, history), fit.log_likelihood, 1e-9)
    assert len(fit.start_log_likelihoods) == 2
    assert '"log_likelihood"' in fit.to_json()

    for bad in (lambda: pygrp.WeibullParams(-1.0, 1.0),
                lambda: pygrp.RestorationFactors(1.5, 0.0),
                lambda: pygrp.trajectory([("XX", 1.0)], f),
                lambda: pygrp.fit_mle([[]])):
        try:
            bad()
        except ValueError:
            pass
        else:
            raise AssertionError("expected ValueError")

    print(
        "pygrp smoke test ok: theta=%.3f b=%.3f q_pm=%.3f q_cm=%.3f loglik=%.4f (truth %.4f)"
        % (fit.params.theta, fit.params.b, fit.factors.q_pm, fit.factors.q_cm, fit.log_likelihood, truth)
    )


if __name__ == "__main__":
    main()
