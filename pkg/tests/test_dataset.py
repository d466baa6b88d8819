import json

import numpy as np
import pytest

from spoofbench.channel import ChannelParams
from spoofbench.dataset import (
    DatasetFormatError,
    DatasetSpec,
    LabeledDataset,
    generate,
    iter_delta_rows,
    load,
    row_plan,
    save,
    select_bs_subset,
    spec_from_dict,
    spec_hash,
    spec_to_dict,
)
from spoofbench.features import FEATURES_PER_BS
from spoofbench.scenario import default_config


def small_spec(method="mvsk", n_bs=3, seed=1, train=40, test=20):
    return DatasetSpec(
        scenario=default_config(rng_seed=seed),
        channel=ChannelParams(carrier_frequency=2.0, rng_seed=seed),
        method=method,
        n_bs=n_bs,
        train_size=train,
        test_size=test,
        rng_seed=seed,
    )


def test_select_bs_subset():
    assert select_bs_subset(3) == (1, 2, 3)
    assert select_bs_subset(2) == (1, 3)
    assert select_bs_subset(1) == (1,)
    with pytest.raises(ValueError):
        select_bs_subset(4)


def test_spec_default_sizes_match_reference_dataset():
    spec = DatasetSpec(
        scenario=default_config(),
        channel=ChannelParams(carrier_frequency=2.0),
        method="wd",
        n_bs=3,
    )
    assert spec.train_size == 2259
    assert spec.test_size == 969


def test_generate_shapes_and_balance():
    spec = small_spec(method="mvsk", n_bs=3, train=41, test=20)
    train_ds, test_ds = generate(spec)
    assert len(train_ds.rows) == 41 and len(test_ds.rows) == 20
    assert train_ds.width == 12 and test_ds.width == 12
    for ds in (train_ds, test_ds):
        spoofed = sum(r.label for r in ds.rows)
        assert abs(spoofed - (len(ds.rows) - spoofed)) <= 1
    assert train_ds.split == "train" and test_ds.split == "test"
    assert train_ds.provenance == spec_hash(spec)


@pytest.mark.parametrize("method,n_bs", [("mvsk", 2), ("box", 1), ("wd", 3)])
def test_generate_width_matches_method_and_stations(method, n_bs):
    train_ds, _ = generate(small_spec(method=method, n_bs=n_bs, train=8, test=4))
    assert train_ds.width == n_bs * FEATURES_PER_BS[method]


def test_generate_is_deterministic():
    a_train, a_test = generate(small_spec(seed=5))
    b_train, b_test = generate(small_spec(seed=5))
    assert a_train == b_train
    assert a_test == b_test
    c_train, _ = generate(small_spec(seed=6))
    assert a_train != c_train


def test_train_and_test_noise_seeds_are_disjoint():
    spec = small_spec(train=200, test=200)
    train_seeds = {p.noise_seed for p in row_plan(spec, "train")}
    test_seeds = {p.noise_seed for p in row_plan(spec, "test")}
    assert not train_seeds & test_seeds
    assert len(train_seeds) == 200 and len(test_seeds) == 200


def test_row_plan_cycles_spoofed_destinations():
    spec = small_spec(train=64, test=4)
    plans = row_plan(spec, "train")
    assert all(p.label == (p.index % 2 == 0) for p in plans)
    spoofed_dests = [p.dest_index for p in plans if p.label]
    assert set(spoofed_dests) <= set(range(1, 16))
    assert all(p.dest_index == 0 for p in plans if not p.label)


def test_delta_rows_agree_with_mvsk_mean_feature():
    spec = small_spec(method="mvsk", n_bs=2, train=6, test=4)
    train_ds, _ = generate(spec)
    for (deltas, label), row in zip(iter_delta_rows(spec, "train"), train_ds.rows):
        assert label == row.label
        for k, d in enumerate(deltas):
            mean_feature = row.per_bs[k][1][0]
            assert float(np.mean(d.values)) == pytest.approx(mean_feature, rel=1e-12)


def test_save_load_round_trip(tmp_path):
    train_ds, test_ds = generate(small_spec(method="box", n_bs=2, train=10, test=6))
    for ds, name in ((train_ds, "train.csv"), (test_ds, "test.csv")):
        path = tmp_path / name
        save(ds, path)
        assert load(path) == ds


def test_load_reports_bad_cells(tmp_path):
    ds, _ = generate(small_spec(method="wd", n_bs=1, train=6, test=4))
    path = tmp_path / "train.csv"
    save(ds, path)
    lines = path.read_text().splitlines()

    broken = lines[:]
    broken[2] = broken[2].replace(broken[2].split(",")[1], "not-a-number", 1)
    path.write_text("\n".join(broken) + "\n")
    with pytest.raises(DatasetFormatError, match=r"row 3, column 2"):
        load(path)

    broken = lines[:]
    broken[4] = broken[4] + ",0.5"  # extra cell
    path.write_text("\n".join(broken) + "\n")
    with pytest.raises(DatasetFormatError, match=r"row 5: expected 2 columns, found 3"):
        load(path)

    broken = lines[:]
    broken[1] = "7" + broken[1][1:]
    path.write_text("\n".join(broken) + "\n")
    with pytest.raises(DatasetFormatError, match=r"row 2, column 1"):
        load(path)

    path.write_text("f1,f2\n1.0,2.0\n")
    with pytest.raises(DatasetFormatError, match="header"):
        load(path)


def test_load_requires_sidecar(tmp_path):
    path = tmp_path / "orphan.csv"
    path.write_text("label,f1\n1,0.5\n0,0.3\n")
    with pytest.raises(DatasetFormatError, match="sidecar"):
        load(path)


def test_load_detects_tampered_sidecar(tmp_path):
    ds, _ = generate(small_spec(method="wd", n_bs=1, train=6, test=4))
    path = tmp_path / "train.csv"
    save(ds, path)
    sidecar_path = tmp_path / "train.meta.json"
    doc = json.loads(sidecar_path.read_text())
    doc["spec"]["scenario"]["rng_seed"] = 999  # silently alter provenance
    sidecar_path.write_text(json.dumps(doc))
    with pytest.raises(DatasetFormatError, match="hash"):
        load(path)


def test_spec_dict_round_trip():
    spec = small_spec(method="wd", n_bs=2, seed=3)
    doc = spec_to_dict(spec)
    again = spec_from_dict(json.loads(json.dumps(doc)))
    assert again == spec
    assert spec_hash(again) == spec_hash(spec)


def test_labeled_dataset_requires_both_classes():
    ds, _ = generate(small_spec(train=6, test=4))
    with pytest.raises(ValueError, match="both classes"):
        LabeledDataset(
            rows=[r for r in ds.rows if r.label],
            split="train",
            provenance=ds.provenance,
        )


def test_spec_validation():
    with pytest.raises(ValueError):
        small_spec(method="nope")
    with pytest.raises(ValueError):
        small_spec(n_bs=5)
    with pytest.raises(ValueError):
        small_spec(train=0)
