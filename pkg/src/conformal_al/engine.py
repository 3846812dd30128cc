"""Active-learning cycle orchestration.

One engine instance drives one label task: bootstrap the queue, retrain and
recalibrate on fresh train/validation splits, score and cluster the unlabeled
pool, and keep serving documents while a (possibly background) training job
runs. All mutations are serialized through a single lock; reads of the queue
and status are consistent snapshots.
"""

import json
import threading
from dataclasses import dataclass, field, asdict

import numpy as np

from . import conformal, metrics, select
from .classifier import YES, SparseLogisticClassifier, TrainConfig
from .conformal import CalibrationSet, Thresholds
from .corpus import Annotation, AnnotationStore, dataset_from_state, dataset_to_state
from .embed import TfidfEncoder

SNAPSHOT_MAGIC = "CALV1"


class EngineError(Exception):
    pass


@dataclass(frozen=True)
class EngineConfig:
    alpha: float = 0.1  # 90% confidence
    validation_fraction: float = 0.2
    min_labels_before_training: int = 10
    selection: select.SelectionConfig = field(default_factory=select.SelectionConfig)
    retrain_policy: str = "on_batch_consumed"  # or "every_n_labels:<n>"
    train: TrainConfig = field(default_factory=TrainConfig)
    min_df: int = 2
    max_features: int = 50000
    seed: int = 0

    def __post_init__(self):
        if not 0.0 < self.alpha < 1.0:
            raise ValueError("alpha must lie in (0, 1)")
        if not 0.0 < self.validation_fraction < 1.0:
            raise ValueError("validation_fraction must lie in (0, 1)")
        parse_retrain_policy(self.retrain_policy)

    @classmethod
    def from_dict(cls, d):
        d = dict(d)
        sel_keys = {"k_top", "k_cluster", "high_fraction"}
        sel = {k: d.pop(k) for k in list(d) if k in sel_keys}
        sel["seed"] = d.get("seed", 0)
        train_keys = {"l2", "max_epochs", "class_weighting"}
        tr = {k: d.pop(k) for k in list(d) if k in train_keys}
        tr["seed"] = d.get("seed", 0)
        return cls(selection=select.SelectionConfig(**sel), train=TrainConfig(**tr), **d)

    def to_dict(self):
        d = asdict(self)
        sel = d.pop("selection")
        tr = d.pop("train")
        d.update({k: sel[k] for k in ("k_top", "k_cluster", "high_fraction")})
        d.update({k: tr[k] for k in ("l2", "max_epochs", "class_weighting")})
        return d


def parse_retrain_policy(policy):
    if policy == "on_batch_consumed":
        return ("on_batch_consumed", None)
    if policy.startswith("every_n_labels:"):
        n = int(policy.split(":", 1)[1])
        if n < 1:
            raise ValueError("every_n_labels requires n >= 1")
        return ("every_n_labels", n)
    raise ValueError(f"unknown retrain policy {policy!r}")


def load_config(path):
    """Engine config from a TOML or JSON key/value file."""
    text = open(path, "rb").read()
    if str(path).endswith(".json"):
        return EngineConfig.from_dict(json.loads(text))
    try:
        import tomllib
    except ModuleNotFoundError:  # Python < 3.11
        import tomli as tomllib

    return EngineConfig.from_dict(tomllib.loads(text.decode("utf-8")))


@dataclass
class PredictionRecord:
    doc_id: str
    p_yes: float
    pred_set: frozenset
    s_x: float


class Engine:
    """Conformal active-learning engine for a single label task."""

    def __init__(self, dataset, task_name, config=None, store=None, threaded=False):
        self.dataset = dataset
        self.task_name = task_name
        self.config = config or EngineConfig()
        self.store = store or AnnotationStore()
        if task_name not in self.store.tasks:
            self.store.create_task(task_name)
        self.threaded = threaded
        self.encoder = TfidfEncoder(
            min_df=self.config.min_df, max_features=self.config.max_features
        )
        texts = [d.text for d in dataset.documents]
        self.X = self.encoder.fit_transform(texts)
        self.row_of = {d.doc_id: i for i, d in enumerate(dataset.documents)}
        self.model = None
        self.model_version = 0
        self.thresholds = None
        self.records = {}
        self.queue = []
        self.last_pool = None
        self.bootstrap_queue = []
        self.cycle_index = 0
        self.metrics_history = []
        self.training_in_progress = False
        self._lock = threading.RLock()
        self._train_thread = None
        self._current_batch = set()
        self._served_since_cycle = set()
        self._labels_since_cycle = 0
        self._refill_count = 0

    # ---------------- bootstrap ----------------

    def bootstrap(self, mode="random", annotations=None, keywords=None):
        """Build the initial labeling queue before any model exists."""
        with self._lock:
            rng = np.random.default_rng([self.config.seed, 0xB007])
            ids = self.dataset.doc_ids()
            if mode == "pre_labeled":
                for ann in annotations or []:
                    self.store.record(
                        Annotation(
                            doc_id=ann.doc_id,
                            task_name=self.task_name,
                            cls=ann.cls,
                            origin="pre_labeled",
                            annotator=ann.annotator,
                        ),
                        self.dataset,
                    )
                rest = [d for d in ids if (d, self.task_name) not in self.store.active]
                order = list(rng.permutation(len(rest)))
                self.bootstrap_queue = [rest[i] for i in order]
            elif mode == "keyword":
                terms = {t.lower() for t in (keywords or [])}
                from .embed import tokenize

                matches = [
                    d.doc_id
                    for d in self.dataset.documents
                    if terms & set(tokenize(d.text))
                ]
                if not matches:
                    order = list(rng.permutation(len(ids)))
                    self.bootstrap_queue = [ids[i] for i in order]
                else:
                    rest = [d for d in ids if d not in set(matches)]
                    order = list(rng.permutation(len(rest)))
                    self.bootstrap_queue = matches + [rest[i] for i in order]
            elif mode == "random":
                order = list(rng.permutation(len(ids)))
                self.bootstrap_queue = [ids[i] for i in order]
            else:
                raise EngineError(f"unknown bootstrap mode {mode!r}")
            self._maybe_trigger_cycle()
            return list(self.bootstrap_queue)

    # ---------------- views ----------------

    def labeled(self):
        return self.store.active_for_task(self.task_name)

    def labels_total(self):
        return len(self.labeled())

    def unlabeled_ids(self):
        labeled = self.labeled()
        return [d for d in self.dataset.doc_ids() if d not in labeled]

    def status(self):
        with self._lock:
            return {
                "cycle_index": self.cycle_index,
                "labels_total": self.labels_total(),
                "training_in_progress": self.training_in_progress,
                "queue_depth": len(self.queue),
            }

    # ---------------- cycle ----------------

    def run_cycle(self):
        """Train, calibrate, score all unlabeled docs, select the next batch."""
        with self._lock:
            labeled = self.labeled()
            if len(labeled) < self.config.min_labels_before_training:
                raise EngineError(
                    f"{len(labeled)} labels < minimum "
                    f"{self.config.min_labels_before_training} before training"
                )
            cycle = self.cycle_index + 1
            items = sorted(labeled.items())
            cfg = self.config

        # train/validation split, re-drawn each cycle
        rng = np.random.default_rng([cfg.seed, cycle, 1])
        perm = rng.permutation(len(items))
        n_val = round(cfg.validation_fraction * len(items))
        n_val = min(max(n_val, 0), len(items) - 1)
        val_idx = set(perm[:n_val].tolist())
        train_items = [items[i] for i in range(len(items)) if i not in val_idx]
        val_items = [items[i] for i in sorted(val_idx)]

        rows = [self.row_of[d] for d, _ in train_items]
        y = np.array([1.0 if a.cls == YES else 0.0 for _, a in train_items])
        clf = SparseLogisticClassifier(**cfg.train.__dict__)
        clf.fit(self.X[rows], y)

        # calibrate on the validation split
        cal = CalibrationSet()
        if val_items:
            val_rows = [self.row_of[d] for d, _ in val_items]
            p_val = clf.predict_p_yes(self.X[val_rows])
            for (_, ann), p in zip(val_items, p_val):
                p_label = p if ann.cls == YES else 1.0 - p
                cal.add(ann.cls, conformal.conformity_score(p_label))
        thresholds = conformal.calibrate(cal, cfg.alpha)

        # score every unlabeled doc
        unlabeled = [d for d in self.dataset.doc_ids() if d not in labeled]
        records = {}
        scored = []
        if unlabeled:
            u_rows = [self.row_of[d] for d in unlabeled]
            p_u = clf.predict_p_yes(self.X[u_rows])
            sets, s_x = conformal.predict_batch(p_u, thresholds)
            for doc_id, p, st, s in zip(unlabeled, p_u, sets, s_x):
                records[doc_id] = PredictionRecord(
                    doc_id=doc_id, p_yes=float(p), pred_set=st, s_x=float(s)
                )
                scored.append((doc_id, float(s)))

        # pool -> cluster -> representatives
        queue = []
        pool = None
        if scored:
            ordering = select.rank_unlabeled(scored)
            pool = select.build_pool(ordering, cfg.selection)
            pool_ids = pool.doc_ids()
            k = min(cfg.selection.k_cluster, len(pool_ids))
            if len(pool_ids) <= k:
                queue = list(pool_ids)
            else:
                pool_rows = [self.row_of[d] for d in pool_ids]
                labels, centroids, _ = select.kmeans(
                    self.X[pool_rows], k, [cfg.seed, cycle, 2]
                )
                queue = select.pick_representatives(
                    pool_ids, self.X[pool_rows], labels, centroids
                )

        # per-cycle metrics on the validation split (all labeled if empty)
        eval_items = val_items or items
        eval_rows = [self.row_of[d] for d, _ in eval_items]
        p_eval = clf.predict_p_yes(self.X[eval_rows])
        report = metrics.bootstrap_report(
            p_eval,
            [a.cls for _, a in eval_items],
            seed=int(np.random.default_rng([cfg.seed, cycle, 3]).integers(2**31)),
        )

        with self._lock:
            self.model = clf
            self.model_version += 1
            self.thresholds = thresholds
            self.records = records
            self.queue = queue
            self.last_pool = pool
            self.cycle_index = cycle
            self._current_batch = set(queue)
            self._served_since_cycle = set()
            self._labels_since_cycle = 0
            self._refill_count = 0
            self.metrics_history.append(
                {
                    "cycle_index": cycle,
                    "labels_total": len(items),
                    "report": report,
                }
            )
        return self.cycle_index

    # ---------------- queue serving ----------------

    def next_to_label(self):
        """Next document to annotate, or None when the corpus is fully labeled."""
        with self._lock:
            labeled = self.labeled()
            unlabeled_exists = len(labeled) < len(self.dataset)
            if not unlabeled_exists:
                return None
            while self.queue:
                doc_id = self.queue.pop(0)
                if doc_id not in labeled:
                    self._served_since_cycle.add(doc_id)
                    return doc_id
            # queue exhausted
            if self.training_in_progress and self.last_pool is not None:
                exclude = set(labeled) | self._served_since_cycle
                self._refill_count += 1
                ids, _ = select.refill(
                    self.last_pool,
                    exclude,
                    1,
                    [self.config.seed, self.cycle_index, 4, self._refill_count],
                )
                if ids:
                    self._served_since_cycle.add(ids[0])
                    return ids[0]
            if (
                not self.training_in_progress
                and self.model is not None
                and self.labels_total() >= self.config.min_labels_before_training
            ):
                self.run_cycle()
                return self.next_to_label()
            if self.last_pool is not None:
                exclude = set(labeled) | self._served_since_cycle
                self._refill_count += 1
                ids, _ = select.refill(
                    self.last_pool,
                    exclude,
                    1,
                    [self.config.seed, self.cycle_index, 4, self._refill_count],
                )
                if ids:
                    self._served_since_cycle.add(ids[0])
                    return ids[0]
            # pre-model (or exhausted pool): serve from the bootstrap order
            for doc_id in self.bootstrap_queue:
                if doc_id not in labeled and doc_id not in self._served_since_cycle:
                    self._served_since_cycle.add(doc_id)
                    return doc_id
            # fall back to any unlabeled doc (re-serving is allowed over
            # returning a premature completion signal)
            for doc_id in self.dataset.doc_ids():
                if doc_id not in labeled:
                    self._served_since_cycle.add(doc_id)
                    return doc_id
            return None

    def submit_label(self, doc_id, cls, annotator, origin="manual"):
        """Record a judgment and evaluate the retrain policy."""
        with self._lock:
            already = (doc_id, self.task_name) in self.store.active
            self.store.record(
                Annotation(
                    doc_id=doc_id,
                    task_name=self.task_name,
                    cls=cls,
                    origin=origin,
                    annotator=annotator,
                ),
                self.dataset,
            )
            if not already:
                self._labels_since_cycle += 1
            self._current_batch.discard(doc_id)
            self._maybe_trigger_cycle()
            return {
                "labels_total": self.labels_total(),
                "cycle_index": self.cycle_index,
                "training_in_progress": self.training_in_progress,
            }

    def _maybe_trigger_cycle(self):
        if self.training_in_progress:
            return
        total = self.labels_total()
        if total < self.config.min_labels_before_training:
            return
        kind, n = parse_retrain_policy(self.config.retrain_policy)
        if self.model is None:
            fire = True
        elif kind == "on_batch_consumed":
            fire = not self._current_batch
        else:
            fire = self._labels_since_cycle >= n
        if not fire:
            return
        if self.threaded:
            self.training_in_progress = True
            self._train_thread = threading.Thread(target=self._background_cycle)
            self._train_thread.start()
        else:
            self.run_cycle()

    def _background_cycle(self):
        try:
            self.run_cycle()
        finally:
            with self._lock:
                self.training_in_progress = False

    def trigger_retrain(self):
        """Manual cycle trigger; refuses while a training job is running."""
        with self._lock:
            if self.training_in_progress:
                raise EngineError("training already in progress")
            if self.labels_total() < self.config.min_labels_before_training:
                raise EngineError("not enough labels to train")
            if self.threaded:
                self.training_in_progress = True
                self._train_thread = threading.Thread(target=self._background_cycle)
                self._train_thread.start()
                return None
        return self.run_cycle()

    def wait_for_training(self, timeout=60.0):
        t = self._train_thread
        if t is not None:
            t.join(timeout)

    # ---------------- metrics ----------------

    def metric_report(self):
        with self._lock:
            if not self.metrics_history:
                return None
            return self.metrics_history[-1]["report"]

    def convergence(self):
        with self._lock:
            return metrics.convergence_series(self.metrics_history)

    # ---------------- persistence ----------------

    def snapshot_state(self, path):
        """Write the full engine state as CALV1 newline-delimited records."""
        with self._lock:
            records = [
                {"kind": "config", "data": self.config.to_dict(), "task": self.task_name},
                {"kind": "dataset", "data": dataset_to_state(self.dataset)},
                {"kind": "store", "data": self.store.to_state()},
                {
                    "kind": "cycle",
                    "data": {
                        "cycle_index": self.cycle_index,
                        "model_version": self.model_version,
                        "queue": list(self.queue),
                        "bootstrap_queue": list(self.bootstrap_queue),
                        "current_batch": sorted(self._current_batch),
                        "served": sorted(self._served_since_cycle),
                        "labels_since_cycle": self._labels_since_cycle,
                        "refill_count": self._refill_count,
                        "model": None if self.model is None else self.model.to_state(),
                        "thresholds": None
                        if self.thresholds is None
                        else self.thresholds.to_state(),
                        "records": [
                            {
                                "doc_id": r.doc_id,
                                "p_yes": r.p_yes,
                                "set": sorted(r.pred_set),
                                "s_x": r.s_x,
                            }
                            for r in self.records.values()
                        ],
                        "pool": None
                        if self.last_pool is None
                        else {"high": self.last_pool.high, "low": self.last_pool.low},
                    },
                },
            ]
        with open(path, "w", encoding="utf-8") as fh:
            fh.write(SNAPSHOT_MAGIC + "\n")
            fh.write(json.dumps({"format_version": 1, "records": len(records)}) + "\n")
            for rec in records:
                fh.write(json.dumps(rec, sort_keys=True) + "\n")

    @classmethod
    def load_state(cls, path, threaded=False):
        with open(path, encoding="utf-8") as fh:
            magic = fh.readline().strip()
            if magic != SNAPSHOT_MAGIC:
                raise EngineError(f"snapshot version mismatch: got {magic!r}, want {SNAPSHOT_MAGIC}")
            manifest = json.loads(fh.readline())
            if manifest.get("format_version") != 1:
                raise EngineError("unsupported snapshot format version")
            by_kind = {}
            for line in fh:
                if line.strip():
                    rec = json.loads(line)
                    by_kind[rec["kind"]] = rec
        cfg_rec = by_kind["config"]
        dataset = dataset_from_state(by_kind["dataset"]["data"])
        store = AnnotationStore.from_state(by_kind["store"]["data"])
        engine = cls(
            dataset,
            cfg_rec["task"],
            EngineConfig.from_dict(cfg_rec["data"]),
            store=store,
            threaded=threaded,
        )
        cyc = by_kind["cycle"]["data"]
        engine.cycle_index = cyc["cycle_index"]
        engine.model_version = cyc["model_version"]
        engine.queue = list(cyc["queue"])
        engine.bootstrap_queue = list(cyc["bootstrap_queue"])
        engine._current_batch = set(cyc["current_batch"])
        engine._served_since_cycle = set(cyc["served"])
        engine._labels_since_cycle = cyc["labels_since_cycle"]
        engine._refill_count = cyc["refill_count"]
        if cyc["model"] is not None:
            engine.model = SparseLogisticClassifier.from_state(cyc["model"])
        if cyc["thresholds"] is not None:
            engine.thresholds = Thresholds.from_state(cyc["thresholds"])
        engine.records = {
            r["doc_id"]: PredictionRecord(
                doc_id=r["doc_id"],
                p_yes=r["p_yes"],
                pred_set=frozenset(r["set"]),
                s_x=r["s_x"],
            )
            for r in cyc["records"]
        }
        if cyc["pool"] is not None:
            engine.last_pool = select.Pool(
                high=[tuple(p) for p in cyc["pool"]["high"]],
                low=[tuple(p) for p in cyc["pool"]["low"]],
            )
        return engine
