import json
import shutil

import pandas as pd
import pytest

from diffal.config import ALConfig, StopRule
from diffal.constants import METRICS_COLUMNS
from diffal.exceptions import CorruptRoundRecord, RunLocked, UnreachableException
from diffal.orchestrator import (
    ActiveLearningRunner, LOCK_FILE, MANIFEST_FILE, METRICS_FILE, check_partition, evaluate, expand_matrix,
    initial_labeled_set, load_run, resolve_config, resume, round_dir, run_active_learning, run_matrix,
)
from diffal.storage import load_checkpoint, load_dataset

def _metrics(run_dir) -> pd.DataFrame:
    return pd.read_csv(run_dir / METRICS_FILE, float_precision="round_trip")

def test_resolve_config_defaults(small_dataset, small_dataset_dir):
    cfg = resolve_config(ALConfig(dataset=str(small_dataset_dir), seed=4), small_dataset)
    # desk profile: 200 initial labels capped below the 40 training samples
    assert cfg.initial_labeled == 39
    assert cfg.round_batch == 1
    assert cfg.model.input_size == 24
    assert cfg.model.encoder_channels == [1, 16, 32, 64]
    assert cfg.train.seed == 4
    explicit = resolve_config(ALConfig(dataset=str(small_dataset_dir), initial_labeled=10), small_dataset)
    assert explicit.round_batch == 3
    with pytest.raises(ValueError):
        resolve_config(ALConfig(dataset=str(small_dataset_dir), initial_labeled=40), small_dataset)

def test_initial_labeled_set(micro_config, small_dataset):
    cfg = resolve_config(micro_config, small_dataset)
    labeled = initial_labeled_set(small_dataset, cfg)
    assert labeled == sorted(labeled)
    assert len(set(labeled)) == 20
    assert set(labeled) <= set(small_dataset.split_indices("train").tolist())
    assert labeled == initial_labeled_set(small_dataset, cfg)

def test_check_partition_rejects_leaks(small_dataset):
    train = small_dataset.split_indices("train").tolist()
    check_partition(small_dataset, train[:10], train[10:])
    with pytest.raises(UnreachableException):
        check_partition(small_dataset, train[:10], train[9:])
    with pytest.raises(UnreachableException):
        check_partition(small_dataset, train[:10] + [int(small_dataset.split_indices("test")[0])], train[10:])

def test_pool_taken_in_one_batch_gives_two_rounds(micro_config, tmp_path):
    run_dir = tmp_path / "run"
    state = run_active_learning(micro_config, run_dir)
    assert state.finished
    assert state.round == 2 and state.pool == []
    metrics = _metrics(run_dir)
    assert list(metrics.columns) == METRICS_COLUMNS
    assert metrics["labeled_count"].tolist() == [20, 40]
    assert metrics["labeled_frac"].tolist() == [0.5, 1.0]
    assert (metrics[["train_wall_s", "acq_wall_s"]] == 0.0).all().all()
    assert (round_dir(run_dir, 0) / "acquired.csv").exists()
    assert not (round_dir(run_dir, 1) / "acquired.csv").exists()
    log = pd.read_csv(round_dir(run_dir, 0) / "train_log.csv")
    assert log["epoch"].tolist() == [1, 2] and (log["wall_s"] == 0.0).all()
    manifest = json.loads((run_dir / MANIFEST_FILE).read_text())
    assert manifest["config"]["initial_labeled"] == 20
    assert manifest["seeds"] == {"data": 3, "model": 3, "acquisition": 3}
    assert not manifest["reference_only"]
    assert not (run_dir / LOCK_FILE).exists()

def test_labeled_set_grows_and_partitions(micro_config, small_dataset, tmp_path):
    cfg = micro_config.model_copy(update={"round_batch": 8, "strategy": "diversity"})
    state = run_active_learning(cfg, tmp_path / "run")
    counts = [row["labeled_count"] for row in state.history]
    assert counts == [20, 28, 36, 40, 40][:len(counts)]
    assert counts == sorted(counts)
    assert len(state.labeled) == 40 and state.pool == []
    assert set(state.labeled) == set(small_dataset.split_indices("train").tolist())
    acquired = pd.read_csv(round_dir(tmp_path / "run", 2) / "acquired.csv")
    # short final batch when fewer than B remain
    assert len(acquired) == 4
    scores = pd.read_csv(round_dir(tmp_path / "run", 0) / "scores.csv")
    assert scores["selected"].sum() == 8 and len(scores) == 20

def test_max_labeled_stop_trims_last_batch(micro_config, tmp_path):
    cfg = micro_config.model_copy(update={
        "round_batch": 8, "stop": StopRule(kind="max-labeled", max_labeled=30),
    })
    state = run_active_learning(cfg, tmp_path / "run")
    assert [row["labeled_count"] for row in state.history] == [20, 28, 30]
    assert state.finished and len(state.pool) == 10

def test_target_metric_stop(micro_config, tmp_path):
    cfg = micro_config.model_copy(update={"stop": StopRule(kind="target-metric", target_wmae=10.0)})
    state = run_active_learning(cfg, tmp_path / "run")
    assert state.finished and len(state.history) == 1
    assert len(state.labeled) == 20

def test_checkpoint_reproduces_reported_metrics(micro_config, tmp_path):
    run_dir = tmp_path / "run"
    state = run_active_learning(micro_config, run_dir)
    ds = load_dataset(micro_config.dataset)
    for row, checkpoint in zip(state.history, state.checkpoints):
        _, model = load_checkpoint(run_dir / checkpoint)
        report = evaluate(model, ds, "test", micro_config.train.loss_w)
        assert report.wmae_all == pytest.approx(row["wmae_all"], abs=1e-6)

def test_pause_and_resume_is_identical(micro_config, tmp_path):
    cfg = micro_config.model_copy(update={"round_batch": 10})
    full, paused = tmp_path / "full", tmp_path / "paused"
    run_active_learning(cfg, full)
    state = run_active_learning(cfg, paused, max_rounds=1)
    assert state.round == 1 and not state.finished
    # a round directory without its completion record is re-run
    partial = round_dir(paused, 1)
    partial.mkdir()
    (partial / "train_log.csv").write_text("garbage\n")
    state = resume(paused)
    assert state.finished and state.round == 3
    assert (full / METRICS_FILE).read_bytes() == (paused / METRICS_FILE).read_bytes()
    for i in range(2):
        assert (round_dir(full, i) / "acquired.csv").read_bytes() == (round_dir(paused, i) / "acquired.csv").read_bytes()

def test_resume_finished_run_is_a_no_op(micro_config, tmp_path):
    run_dir = tmp_path / "run"
    run_active_learning(micro_config, run_dir)
    before = (run_dir / METRICS_FILE).read_bytes()
    state = resume(run_dir)
    assert state.finished
    assert (run_dir / METRICS_FILE).read_bytes() == before

def test_warm_start_resume(micro_config, tmp_path):
    cfg = micro_config.model_copy(update={
        "round_batch": 10, "train": micro_config.train.model_copy(update={"warm_start": True}),
    })
    full, paused = tmp_path / "full", tmp_path / "paused"
    run_active_learning(cfg, full)
    run_active_learning(cfg, paused, max_rounds=2)
    resume(paused)
    assert (full / METRICS_FILE).read_bytes() == (paused / METRICS_FILE).read_bytes()

def test_corrupt_round_record(micro_config, tmp_path):
    run_dir = tmp_path / "run"
    run_active_learning(micro_config, run_dir, max_rounds=1)
    (round_dir(run_dir, 0) / "round.json").write_text("{not json")
    with pytest.raises(CorruptRoundRecord) as e:
        resume(run_dir)
    assert e.value.round_index == 0

def test_tampered_acquisition_is_detected(micro_config, tmp_path):
    run_dir = tmp_path / "run"
    run_active_learning(micro_config, run_dir, max_rounds=1)
    path = round_dir(run_dir, 0) / "round.json"
    record = json.loads(path.read_text())
    _, ds, _ = load_run(run_dir)
    record["acquired"][0] = int(ds.split_indices("test")[0])
    path.write_text(json.dumps(record))
    with pytest.raises(CorruptRoundRecord):
        resume(run_dir)

def test_lock_and_existing_run(micro_config, tmp_path):
    run_dir = tmp_path / "run"
    run_dir.mkdir()
    (run_dir / LOCK_FILE).write_text("")
    with pytest.raises(RunLocked):
        run_active_learning(micro_config, run_dir)
    (run_dir / LOCK_FILE).unlink()
    run_active_learning(micro_config, run_dir, max_rounds=1)
    with pytest.raises(FileExistsError):
        run_active_learning(micro_config, run_dir)
    (run_dir / LOCK_FILE).write_text("")
    with pytest.raises(RunLocked):
        resume(run_dir)

def test_changed_dataset_is_rejected(micro_config, small_dataset_dir, tmp_path):
    data = tmp_path / "data"
    shutil.copytree(small_dataset_dir, data)
    run_dir = tmp_path / "run"
    run_active_learning(micro_config.model_copy(update={"dataset": str(data)}), run_dir, max_rounds=1)
    with open(data / "params.csv", "a") as f:
        f.write("\n")
    with pytest.raises(ValueError):
        resume(run_dir)

def test_unsplit_dataset_is_rejected(micro_config, physics, tmp_path):
    from diffal.config import SolverConfig
    from diffal.datagen import generate_dataset
    from diffal.storage import save_dataset

    path = save_dataset(generate_dataset(4, 24, physics, SolverConfig(), seed=0), tmp_path / "raw")
    with pytest.raises(ValueError):
        run_active_learning(micro_config.model_copy(update={"dataset": str(path)}), tmp_path / "run")

@pytest.mark.parametrize("strategy", ["tod", "trueloss", "diversity"])
def test_strategies_acquire_from_the_pool(strategy, micro_config, tmp_path):
    cfg = micro_config.model_copy(update={"strategy": strategy, "round_batch": 5})
    state = run_active_learning(cfg, tmp_path / "run", max_rounds=1)
    acquired = pd.read_csv(round_dir(tmp_path / "run", 0) / "acquired.csv")["idx"].tolist()
    assert len(acquired) == 5
    assert state.labeled[-5:] == acquired
    assert not set(acquired) & set(state.pool)
    manifest = json.loads((tmp_path / "run" / MANIFEST_FILE).read_text())
    assert manifest["reference_only"] == (strategy == "trueloss")

def test_entropy_run_on_cnn(micro_config, mini_cnn, tmp_path):
    cfg = ALConfig.model_validate({
        **micro_config.model_dump(exclude={"seeds"}),
        "arch": "cnn", "strategy": "entropy", "model": mini_cnn.model_dump(), "mc_passes": 4, "round_batch": 5,
    })
    run_active_learning(cfg, tmp_path / "run", max_rounds=1)
    resolved, _, _ = load_run(tmp_path / "run")
    assert resolved.model.dropout_rate == cfg.entropy_dropout
    scores = pd.read_csv(round_dir(tmp_path / "run", 0) / "scores.csv")
    assert len(scores) == 20 and scores["selected"].sum() == 5

def test_expand_matrix_skips_unet_entropy(micro_config, mini_cnn, mini_unet):
    cfgs = expand_matrix(micro_config, ["unet", "cnn"], ["random", "entropy"], [0, 1],
                         models={"unet": mini_unet, "cnn": mini_cnn})
    cells = [(c.arch, c.strategy, c.seed) for c in cfgs]
    assert ("unet", "entropy", 0) not in cells
    assert len(cells) == 6
    assert all(c.seeds.model == c.seed for c in cfgs)

def test_run_matrix_mean_and_std(micro_config, mini_unet, tmp_path):
    cfgs = expand_matrix(micro_config, ["unet"], ["random"], [0, 1, 2], models={"unet": mini_unet})
    result = run_matrix(cfgs, tmp_path / "matrix")
    assert all(cell.status for cell in result.cells)
    assert len(result.combined) == 6
    summary = pd.read_csv(tmp_path / "matrix" / "summary.csv")
    assert summary["n_seeds"].tolist() == [3, 3]
    for r in (0, 1):
        values = result.combined.loc[result.combined["round"] == r, "wmae_all"]
        row = summary[summary["round"] == r].iloc[0]
        assert row["wmae_all_mean"] == pytest.approx(values.mean())
        assert row["wmae_all_std"] == pytest.approx(values.std())

def test_run_matrix_records_failed_cells(micro_config, mini_unet, tmp_path):
    cfgs = expand_matrix(micro_config, ["unet"], ["random"], [0, 1], models={"unet": mini_unet})
    (tmp_path / "matrix" / "unet-random-seed1").mkdir(parents=True)
    (tmp_path / "matrix" / "unet-random-seed1" / LOCK_FILE).write_text("")
    result = run_matrix(cfgs, tmp_path / "matrix")
    assert [cell.status for cell in result.cells] == [True, False]
    assert "locked" in result.cells[1].error
    assert set(result.combined["seed"]) == {0}

def test_runner_generate(tmp_path):
    ds = ActiveLearningRunner("desk").generate(tmp_path / "ds", n=20, size=24, seed=1)
    assert ds.split_counts() == {"train": 16, "val": 2, "test": 2}
    assert load_dataset(tmp_path / "ds") == ds
    with pytest.raises(ValueError):
        ActiveLearningRunner("huge")
