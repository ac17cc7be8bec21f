"""Quick end-to-end check of the compiled `medstack` module.

Build and install first:
    maturin develop -m crates/python/Cargo.toml --release
"""

import math

import medstack


def main():
    data = medstack.load_dataset("pima")
    assert (data.n_samples, data.n_features) == (768, 8), data
    assert data.class_counts() == (500, 268)
    assert abs(data.majority_rate() - 500 / 768) < 1e-12

    folds = medstack.kfold(data, 10, 42)
    assert len(folds) == 10
    assert sorted(i for _, test in folds for i in test) == list(range(768))

    train_idx, test_idx = folds[0]
    clean = data.impute(train_idx)
    train, test = clean.subset(train_idx), clean.subset(test_idx)

    for name in ["logistic", "naive-bayes", "knn", "decision-tree", "random-forest"]:
        model = medstack.fit(name, train, seed=7)
        proba = model.predict_proba(test.features)
        assert all(0.0 <= p <= 1.0 for p in proba)
        pred = model.predict(test.features)
        assert pred == [int(p >= 0.5) for p in proba]
        m = medstack.evaluate(pred, test.labels)
        assert m["tp"] + m["tn"] + m["fp"] + m["fn"] == len(test)
        print(f"{name:14s} accuracy {m['accuracy']:.3f}")

    knn3 = medstack.fit("knn", train, params={"k": 3})
    assert knn3.name == "knn"

    m = medstack.metrics_from_counts(40, 45, 5, 10)
    assert math.isclose(m["accuracy"], 0.85)
    assert math.isclose(m["sensitivity"], 0.8)
    assert medstack.metrics_from_counts(0, 5, 0, 0)["sensitivity"] is None

    fpr, tpr, _ = medstack.roc_curve([0.9, 0.8, 0.3, 0.1], [1, 0, 1, 0])
    assert (fpr[0], tpr[0], fpr[-1], tpr[-1]) == (0.0, 0.0, 1.0, 1.0)
    assert math.isclose(medstack.roc_auc([0.9, 0.8, 0.3, 0.1], [1, 0, 1, 0]), 0.75)

    assert math.isclose(medstack.entropy([0, 0, 1, 1]), 1.0)
    assert math.isclose(medstack.gini([0, 0, 1, 1]), 0.5)
    assert math.isclose(medstack.stage_weight(0.25), 0.5 * math.log(3))

    rows = medstack.run('datasets = ["statlog-heart"]\nk = 3\nroster = ["majority", "logistic"]\n')
    assert [r["model"] for r in rows] == ["majority", "logistic"]
    print(f"heart 3-fold logistic accuracy {rows[1]['accuracy']:.3f}")

    print("smoke test passed")


if __name__ == "__main__":
    main()
