"""Smoke test for the pysparselvq extension module.

Build the module first (see README), then run with the directory holding
pysparselvq.so on PYTHONPATH.
"""

import json
import math

import pysparselvq as sl


def main():
    assert abs(sl.abs_smooth(0.0, 5.0) - math.log(4) / 5) < 1e-12
    assert abs(sl.abs_smooth_grad(2.0, 5.0) - math.tanh(5.0)) < 1e-12
    lower, middle, upper, holds = sl.sandwich_check([[0.6, 0.0], [0.0, 0.8]])
    assert holds and abs(middle - 0.64) < 1e-12, (lower, middle, upper)
    assert sl.classifier_mu(3.0, 1.0) == 0.5
    assert sl.xi_factors(1.0, 1.0) == (0.5, -0.5)

    data, informative = sl.Dataset.synth_sparse(50, 5, 3, 60, noise_sigma=1.0, seed=3)
    assert (data.n_samples, data.n_dims, data.n_classes) == (180, 50, 3)
    train, test = data.split(0.7, True, 3)

    trainer = sl.Trainer(train, model="grlvq", epochs=30, seed=3)
    history = trainer.fit(train, test)
    assert len(history) == 30
    pre = history[-1]["test_accuracy"]
    metrics, models = trainer.run_path(train, test, reg_end=1.0, steps=5, epochs_per_step=3)
    assert len(metrics) == len(models) == 5
    assert all(m["reg_weight"] <= n["reg_weight"] for m, n in zip(metrics, metrics[1:]))

    model = trainer.model
    rel = model.relevances()
    mass = sum(rel[i] for i in informative) / sum(rel)
    again = sl.Model.from_json(model.to_json())
    assert again.evaluate(test) == model.evaluate(test)
    assert json.loads(model.to_json())["kind"] == "grlvq"

    try:
        model.predict([0.0] * 3)
    except ValueError as e:
        assert "n_model=50" in str(e)
    else:
        raise AssertionError("dimension mismatch not reported")

    print(
        f"pretrained test acc {pre:.3f}, final test acc {metrics[-1]['test_accuracy']:.3f}, "
        f"sparsity {model.sparsity():.3f}, informative mass {mass:.3f}"
    )
    print("smoke test passed")


if __name__ == "__main__":
    main()
