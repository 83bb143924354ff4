"""Pipeline stages behind the CLI: generate, build, filter, detect, test, report.

Every stage is a plain function over files so campaigns are scriptable and
resumable. Artifacts never contain timestamps; re-running a stage with the
same inputs and configuration reproduces byte-identical outputs. JSON
artifacts embed a provenance block {config_hash, master_seed, tool_version};
plain-format files (QAPLIB .dat, CSV) are kept clean and their provenance
lives in the stage manifest next to them.

Campaign directory convention:

    instances/   *.dat + manifest.json
    lons/        *.lon.json
    filtered/    *.ulon.json
    partitions/  *.<algo>.part.json + .part.csv
    stats/       *.<detector>.null.json, *.assort.json, anova.json
    report/      tables (CSV), figures (SVG), report.json
"""

from __future__ import annotations

import concurrent.futures
import hashlib
import json
import math
from pathlib import Path

import numpy as np

from . import __version__
from .community import (GREEDY, MCL, SPINGLASS, Partition, cross_evaluate,
                        greedy_communities, mcl, spinglass_communities)
from .errors import ComputeError, ParseError, SizeGuardError
from .generators import (INSTANCE_CLASSES, REAL_LIKE, UNIFORM, GeneratorParams,
                         generate, read_instance, write_instance)
from .graphio import load_lon, load_ulon, save_artifact
from .lon import Lon, build_lon
from .stats import (fitness_assortativity, null_ensemble, permutation_anova,
                    q_significance)
from .svgplot import boxplot, errorbar_plot, scatter, strip_plot
from .transform import (DEFAULT_GRID, ThresholdResult, UndirectedLon,
                        density_stats, max_connected_threshold,
                        quantile_filter, symmetrize)

CLI_MAX_N = 11

_CLASS_TAGS = {UNIFORM: "uni", REAL_LIKE: "rl"}
_CLASS_INDEX = {UNIFORM: 0, REAL_LIKE: 1}


def config_hash(config: dict) -> str:
    canonical = json.dumps(config, sort_keys=True, separators=(",", ":"))
    return hashlib.sha256(canonical.encode()).hexdigest()[:16]


def provenance(cfg: dict, master_seed) -> dict:
    return {
        "config_hash": config_hash(cfg),
        "master_seed": master_seed,
        "tool_version": __version__,
    }


def _write_json(path: Path, doc: dict) -> None:
    path.write_text(json.dumps(doc, sort_keys=True, indent=1) + "\n",
                    encoding="utf-8")


def instance_seed(master_seed: int, instance_class: str, n: int, index: int) -> int:
    """Stable per-instance seed; independent of generation order."""
    ss = np.random.SeedSequence(
        entropy=master_seed,
        spawn_key=(_CLASS_INDEX[instance_class], n, index),
    )
    return int(ss.generate_state(1, dtype=np.uint64)[0])


def _expand(paths, suffix: str) -> list[Path]:
    """Accept files or directories; directories are globbed by suffix."""
    out: list[Path] = []
    for p in map(Path, paths):
        if p.is_dir():
            out.extend(sorted(p.glob(f"*{suffix}")))
        elif p.exists():
            out.append(p)
        else:
            raise FileNotFoundError(f"input {p} does not exist")
    if not out:
        raise FileNotFoundError(f"no *{suffix} inputs found in {list(map(str, paths))}")
    return out


# ---------------------------------------------------------------------------
# stages
# ---------------------------------------------------------------------------


def stage_gen(outdir, instance_class: str, n: int, count: int, master_seed: int,
              **gen_kwargs) -> list[Path]:
    if instance_class not in INSTANCE_CLASSES:
        raise ValueError(f"unknown instance class {instance_class!r}")
    cfg = {"stage": "gen", "class": instance_class, "n": n, "count": count,
           "seed": master_seed, **gen_kwargs}
    outdir = Path(outdir)
    outdir.mkdir(parents=True, exist_ok=True)
    manifest: dict = {"provenance": provenance(cfg, master_seed), "files": {}}
    written = []
    for idx in range(count):
        seed = instance_seed(master_seed, instance_class, n, idx)
        params = GeneratorParams(n=n, seed=seed, instance_class=instance_class,
                                 **gen_kwargs)
        inst = generate(params)
        name = f"{_CLASS_TAGS[instance_class]}-n{n:02d}-i{idx:03d}-m{master_seed}"
        path = outdir / f"{name}.dat"
        write_instance(inst, path)
        manifest["files"][path.name] = {
            "class": instance_class, "n": n, "index": idx, "seed": seed,
        }
        written.append(path)
    manifest_path = outdir / "manifest.json"
    if manifest_path.exists():
        old = json.loads(manifest_path.read_text())
        old.get("files", {}).update(manifest["files"])
        manifest["files"] = dict(sorted(old["files"].items()))
    _write_json(manifest_path, manifest)
    return written


def _instance_meta(path: Path) -> dict:
    manifest = path.parent / "manifest.json"
    if manifest.exists():
        entry = json.loads(manifest.read_text()).get("files", {}).get(path.name)
        if entry:
            return entry
    return {}


def _build_one(args) -> Path:
    path, outdir, workers, force_large, cfg = args
    inst = read_instance(path)
    if inst.n > CLI_MAX_N and not force_large:
        raise SizeGuardError(
            f"{path.name}: n={inst.n} exceeds the default guard of "
            f"{CLI_MAX_N}; pass --force-large to build anyway"
        )
    meta = {"instance_file": path.name, **_instance_meta(path),
            "provenance": provenance(cfg, cfg.get("seed"))}
    lon = build_lon(inst, workers=workers, meta=meta)
    out = Path(outdir) / f"{path.stem}.lon.json"
    save_artifact(lon, out)
    return out


def stage_build(inputs, outdir, *, workers: int = 1,
                force_large: bool = False) -> list[Path]:
    files = _expand(inputs, ".dat")
    cfg = {"stage": "build", "force_large": force_large, "seed": None}
    Path(outdir).mkdir(parents=True, exist_ok=True)
    if len(files) == 1 or workers <= 1:
        return [_build_one((f, outdir, workers, force_large, cfg)) for f in files]
    # parallelize across instances; each build is single-process
    args = [(f, outdir, 1, force_large, cfg) for f in files]
    with concurrent.futures.ProcessPoolExecutor(max_workers=workers) as pool:
        return list(pool.map(_build_one, args))


def _lon_stem(path: Path) -> str:
    return path.name.removesuffix(".lon.json")


def stage_filter(inputs, outdir, *, pi: float | None = None,
                 grid_step: float = 0.01) -> list[Path]:
    """Symmetrize and filter; pi=None picks the largest connectivity-
    preserving grid threshold per instance."""
    files = _expand(inputs, ".lon.json")
    cfg = {"stage": "filter", "pi": pi, "grid_step": grid_step, "seed": None}
    outdir = Path(outdir)
    outdir.mkdir(parents=True, exist_ok=True)
    grid = [round(k * grid_step, 10) for k in range(int(round(1.0 / grid_step)))]
    written = []
    for f in files:
        lon = load_lon(f)
        und = symmetrize(lon)
        if pi is None:
            result = max_connected_threshold(und, grid=grid)
            filtered = result.graph
            filtered.provenance["pi_star"] = result.pi_star
        else:
            filtered = quantile_filter(und, pi)
        filtered.provenance["instance"] = _lon_stem(f)
        filtered.provenance["provenance"] = provenance(cfg, None)
        out = outdir / f"{_lon_stem(f)}.ulon.json"
        save_artifact(filtered, out)
        written.append(out)
    return written


def _partition_doc(part: Partition, extra: dict) -> dict:
    return {
        "kind": "partition",
        "algorithm": part.algorithm,
        "k": part.k,
        "q": part.q,
        "params": part.params,
        "seed": part.seed,
        "source": part.source,
        "assignment": {str(k): v for k, v in part.assignment.items()},
        **extra,
    }


def stage_detect(inputs, algo: str, outdir, *, seed: int = 0,
                 options: dict | None = None) -> list[Path]:
    """Detect communities. greedy/spinglass read filtered .ulon.json graphs;
    mcl reads the original directed .lon.json networks."""
    options = options or {}
    cfg = {"stage": "detect", "algo": algo, "seed": seed, **options}
    outdir = Path(outdir)
    outdir.mkdir(parents=True, exist_ok=True)
    suffix = ".lon.json" if algo == MCL else ".ulon.json"
    files = _expand(inputs, suffix)
    written = []
    for f in files:
        stem = f.name.removesuffix(suffix)
        extra = {"instance": stem, "provenance": provenance(cfg, seed)}
        if algo == GREEDY:
            part = greedy_communities(load_ulon(f))
        elif algo == SPINGLASS:
            part = spinglass_communities(load_ulon(f), seed=seed, **options)
        elif algo == MCL:
            result = mcl(load_lon(f), **options)
            if not result.converged:
                doc = {"kind": "partition", "algorithm": MCL, "instance": stem,
                       "converged": False, "iterations": result.iterations,
                       "provenance": provenance(cfg, seed)}
                out = outdir / f"{stem}.{algo}.part.json"
                _write_json(out, doc)
                written.append(out)
                continue
            part = result.partition
        else:
            raise ValueError(f"unknown algorithm {algo!r}")
        doc = _partition_doc(part, {"instance": stem, "converged": True})
        doc["provenance"] = provenance(cfg, seed)
        out = outdir / f"{stem}.{algo}.part.json"
        _write_json(out, doc)
        csv_path = outdir / f"{stem}.{algo}.part.csv"
        rows = ["node_id,community_id"] + [
            f"{node},{comm}" for node, comm in sorted(part.assignment.items())
        ]
        csv_path.write_text("\n".join(rows) + "\n", encoding="utf-8")
        written.append(out)
    return written


def stage_nulltest(filtered_inputs, partitions_dir, detector: str, m: int,
                   master_seed: int, outdir, *,
                   dump_samples: bool = False) -> list[Path]:
    """Modularity significance of each instance against m rewired nulls."""
    files = _expand(filtered_inputs, ".ulon.json")
    cfg = {"stage": "nulltest", "detector": detector, "m": m,
           "seed": master_seed, "dump_samples": dump_samples}
    outdir = Path(outdir)
    outdir.mkdir(parents=True, exist_ok=True)
    partitions_dir = Path(partitions_dir)
    written = []
    for f in files:
        stem = f.name.removesuffix(".ulon.json")
        part_path = partitions_dir / f"{stem}.{detector}.part.json"
        if not part_path.exists():
            raise FileNotFoundError(
                f"missing partition artifact {part_path}; run detect first"
            )
        part_doc = json.loads(part_path.read_text())
        q_obs = part_doc["q"]
        g = load_ulon(f)
        ens = null_ensemble(g, detector, m, _stable_seed(master_seed, stem))
        sig = q_significance(q_obs, ens)
        doc = {
            "kind": "nulltest", "instance": stem, "detector": detector,
            "m": m, "q_obs": q_obs, "mean_q": ens.mean_q, "sd_q": ens.sd_q,
            "p_value": sig.p_value, "z_score": sig.z_score,
            "degenerate": sig.degenerate, "n_failed": ens.n_failed,
            "provenance": provenance(cfg, master_seed),
        }
        out = outdir / f"{stem}.{detector}.null.json"
        _write_json(out, doc)
        if dump_samples:
            sp = outdir / f"{stem}.{detector}.null_samples.csv"
            sp.write_text("\n".join(["q"] + [repr(q) for q in ens.samples]) + "\n",
                          encoding="utf-8")
        written.append(out)
    return written


def _stable_seed(master_seed: int, text: str) -> int:
    digest = hashlib.sha256(f"{master_seed}:{text}".encode()).digest()
    return int.from_bytes(digest[:8], "big")


def stage_assort(lon_inputs, outdir, *, filtered_dir=None) -> list[Path]:
    files = _expand(lon_inputs, ".lon.json")
    cfg = {"stage": "assort", "seed": None}
    outdir = Path(outdir)
    outdir.mkdir(parents=True, exist_ok=True)
    written = []
    for f in files:
        stem = _lon_stem(f)
        lon = load_lon(f)
        doc = {"kind": "assort", "instance": stem,
               "provenance": provenance(cfg, None)}
        try:
            rep = fitness_assortativity(lon)
            doc["unfiltered"] = {
                "spearman_r": rep.spearman_r, "slope": rep.slope,
                "n_points": rep.n_points, "excluded": rep.excluded,
                "low_n": rep.low_n,
            }
        except ValueError as exc:
            doc["unfiltered"] = {"error": str(exc)}
        if filtered_dir is not None:
            fp = Path(filtered_dir) / f"{stem}.ulon.json"
            if fp.exists():
                try:
                    rep = fitness_assortativity(lon, filtered=load_ulon(fp))
                    doc["filtered"] = {
                        "spearman_r": rep.spearman_r, "slope": rep.slope,
                        "n_points": rep.n_points, "excluded": rep.excluded,
                        "low_n": rep.low_n,
                    }
                except ValueError as exc:
                    doc["filtered"] = {"error": str(exc)}
        out = outdir / f"{stem}.assort.json"
        _write_json(out, doc)
        written.append(out)
    return written


def stage_anova(partitions_dir, outdir, *, n_perm: int = 999,
                seed: int = 0) -> Path:
    """Two-factor permutation ANOVA over all stored greedy/spinglass scores."""
    records = []
    for p in sorted(Path(partitions_dir).glob("*.part.json")):
        doc = json.loads(p.read_text())
        if doc.get("algorithm") in (GREEDY, SPINGLASS) and doc.get("converged", True):
            cls = "real-like" if doc["instance"].startswith("rl-") else "uniform"
            records.append((cls, doc["algorithm"], doc["q"]))
    result = permutation_anova(records, n_perm=n_perm, seed=seed)
    cfg = {"stage": "anova", "n_perm": n_perm, "seed": seed}
    doc = {
        "kind": "anova", "n_records": len(records),
        "p_class": result.p_class, "p_algorithm": result.p_algorithm,
        "p_interaction": result.p_interaction,
        "n_permutations": result.n_permutations,
        "observed_f": list(result.observed_f),
        "provenance": provenance(cfg, seed),
    }
    outdir = Path(outdir)
    outdir.mkdir(parents=True, exist_ok=True)
    out = outdir / "anova.json"
    _write_json(out, doc)
    return out


# ---------------------------------------------------------------------------
# report
# ---------------------------------------------------------------------------


def _csv_table(path: Path, header: list[str], rows: list[list]) -> None:
    lines = [",".join(header)]
    for row in rows:
        lines.append(",".join(str(x) for x in row))
    path.write_text("\n".join(lines) + "\n", encoding="utf-8")


def _class_of(stem: str) -> str:
    return "real-like" if stem.startswith("rl-") else "uniform"


def _size_of(stem: str) -> int:
    for part in stem.split("-"):
        if part.startswith("n") and part[1:].isdigit():
            return int(part[1:])
    return -1


def stage_report(campaign_dir, outdir=None) -> Path:
    """Summary tables and figures for whatever stages have completed.

    Missing inputs produce explicit gap entries in report.json, never silent
    omissions; a campaign directory with no artifacts at all is an error.
    """
    campaign = Path(campaign_dir)
    outdir = Path(outdir) if outdir else campaign / "report"
    lon_files = sorted((campaign / "lons").glob("*.lon.json")) \
        if (campaign / "lons").is_dir() else []
    part_files = sorted((campaign / "partitions").glob("*.part.json")) \
        if (campaign / "partitions").is_dir() else []
    null_files = sorted((campaign / "stats").glob("*.null.json")) \
        if (campaign / "stats").is_dir() else []
    assort_files = sorted((campaign / "stats").glob("*.assort.json")) \
        if (campaign / "stats").is_dir() else []
    if not (lon_files or part_files or null_files or assort_files):
        raise FileNotFoundError(
            f"campaign {campaign} has no artifacts; expected at least one of "
            "lons/*.lon.json, partitions/*.part.json, stats/*.null.json, "
            "stats/*.assort.json"
        )
    outdir.mkdir(parents=True, exist_ok=True)
    produced: list[str] = []
    gaps: list[str] = []

    classes_present = {_class_of(_lon_stem(f)) for f in lon_files} | \
        {_class_of(json.loads(f.read_text())["instance"]) for f in part_files}
    if len(classes_present) == 1:
        gaps.append(
            f"only the {next(iter(classes_present))!r} class is present; "
            "class-contrast rows unavailable"
        )

    # per-size class means of network size measures
    if lon_files:
        cells: dict[tuple[str, int], list] = {}
        selfloop_cells: dict[tuple[str, int], list] = {}
        for f in lon_files:
            stem = _lon_stem(f)
            lon = load_lon(f)
            ds = density_stats(lon)
            key = (_class_of(stem), lon.n)
            cells.setdefault(key, []).append(
                (ds.num_vertices, ds.num_edges, ds.edges_over_v_squared)
            )
            selfloop_cells.setdefault(key, []).append(
                (ds.mean_self_loop, ds.mean_out_weight)
            )
        classes = sorted({c for c, _ in cells})
        sizes = sorted({s for _, s in cells})
        for tab_idx, label in ((0, "vertices"), (1, "edges"), (2, "ratio")):
            rows = []
            for cls in classes:
                row = [cls]
                for s in sizes:
                    vals = cells.get((cls, s))
                    row.append(
                        repr(float(np.mean([v[tab_idx] for v in vals])))
                        if vals else "NA"
                    )
                rows.append(row)
            _csv_table(outdir / f"table_{label}.csv",
                       ["class"] + [str(s) for s in sizes], rows)
            produced.append(f"table_{label}.csv")
        rows = []
        series: dict[str, tuple[list, list]] = {}
        for cls in classes:
            means_self, ses_self, means_out, ses_out = [], [], [], []
            for s in sizes:
                vals = selfloop_cells.get((cls, s), [])
                if vals:
                    sw = [v[0] for v in vals]
                    ow = [v[1] for v in vals]
                    se_s = float(np.std(sw, ddof=1) / math.sqrt(len(sw))) \
                        if len(sw) > 1 else 0.0
                    se_o = float(np.std(ow, ddof=1) / math.sqrt(len(ow))) \
                        if len(ow) > 1 else 0.0
                    rows.append([cls, s, repr(float(np.mean(sw))), repr(se_s),
                                 repr(float(np.mean(ow))), repr(se_o)])
                    means_self.append(float(np.mean(sw)))
                    ses_self.append(se_s)
                    means_out.append(float(np.mean(ow)))
                    ses_out.append(se_o)
            if means_self:
                series[f"{cls} self-loop"] = (means_self, ses_self)
                series[f"{cls} outgoing"] = (means_out, ses_out)
        _csv_table(outdir / "selfloop_weights.csv",
                   ["class", "n", "mean_self_loop", "se_self_loop",
                    "mean_out_weight", "se_out_weight"], rows)
        (outdir / "selfloop_weights.svg").write_text(
            errorbar_plot([str(s) for s in sizes], series,
                          title="self-loop vs outgoing transition weight",
                          ylabel="mean weight"), encoding="utf-8")
        produced += ["selfloop_weights.csv", "selfloop_weights.svg"]
    else:
        gaps.append("lons/ missing: size tables and self-loop summary skipped")

    # modularity distributions per class x algorithm
    parts_by_algo: dict[str, dict[str, list[float]]] = {}
    zero_community: list[str] = []
    for f in part_files:
        doc = json.loads(f.read_text())
        if not doc.get("converged", True):
            zero_community.append(doc["instance"])
            continue
        algo = doc["algorithm"]
        cls = _class_of(doc["instance"])
        parts_by_algo.setdefault(algo, {}).setdefault(cls, []).append(doc["q"])
        if doc["algorithm"] == MCL and doc["k"] <= 1:
            zero_community.append(doc["instance"])
    if parts_by_algo:
        groups = {
            f"{cls[:2]}/{algo}": vals
            for algo, per_cls in sorted(parts_by_algo.items())
            for cls, vals in sorted(per_cls.items())
        }
        (outdir / "modularity_box.svg").write_text(
            boxplot(groups, title="modularity by class and algorithm"),
            encoding="utf-8")
        rows = [[algo, cls, repr(q)]
                for algo, per_cls in sorted(parts_by_algo.items())
                for cls, vals in sorted(per_cls.items()) for q in vals]
        _csv_table(outdir / "modularity_scores.csv", ["algorithm", "class", "q"],
                   rows)
        produced += ["modularity_box.svg", "modularity_scores.csv"]
    else:
        gaps.append("partitions/ missing: modularity boxplot skipped")

    # z-score strips per detector
    nulls_by_detector: dict[str, dict[str, list[float]]] = {}
    for f in null_files:
        doc = json.loads(f.read_text())
        if doc.get("z_score") is None:
            continue
        nulls_by_detector.setdefault(doc["detector"], {}).setdefault(
            _class_of(doc["instance"]), []).append(doc["z_score"])
    for detector, groups in sorted(nulls_by_detector.items()):
        name = f"zscores_{detector}.svg"
        (outdir / name).write_text(
            strip_plot(dict(sorted(groups.items())),
                       title=f"Q z-scores vs degree-preserving nulls ({detector})"),
            encoding="utf-8")
        produced.append(name)
    if not null_files:
        gaps.append("stats/*.null.json missing: z-score plots skipped")

    # cross-evaluated weighted Q on unfiltered networks
    if lon_files and part_files:
        cross_rows = []
        cross_groups: dict[str, list[float]] = {}
        lon_by_stem = {_lon_stem(f): f for f in lon_files}
        parts_by_stem: dict[str, dict[str, dict]] = {}
        for f in part_files:
            doc = json.loads(f.read_text())
            parts_by_stem.setdefault(doc["instance"], {})[doc["algorithm"]] = doc
        for stem, algos in sorted(parts_by_stem.items()):
            if stem not in lon_by_stem:
                continue
            und = symmetrize(load_lon(lon_by_stem[stem]))
            for algo, doc in sorted(algos.items()):
                if not doc.get("converged", True):
                    cross_rows.append([stem, algo, "NA"])
                    continue
                assignment = {int(k): v for k, v in doc["assignment"].items()}
                parts = {algo: Partition(assignment, doc["k"], doc["q"], algo)}
                qw = cross_evaluate(parts, und)[algo]
                cross_rows.append([stem, algo, repr(qw)])
                cross_groups.setdefault(
                    f"{_class_of(stem)[:2]}/{algo}", []).append(qw)
        if cross_rows:
            _csv_table(outdir / "cross_weighted_q.csv",
                       ["instance", "algorithm", "weighted_q"], cross_rows)
            (outdir / "cross_weighted_q.svg").write_text(
                boxplot(dict(sorted(cross_groups.items())),
                        title="weighted Q on unfiltered networks"),
                encoding="utf-8")
            produced += ["cross_weighted_q.csv", "cross_weighted_q.svg"]

    # assortativity summary + showcase scatters
    if assort_files:
        rows = []
        best: dict[str, tuple[float, str]] = {}
        for f in assort_files:
            doc = json.loads(f.read_text())
            stem = doc["instance"]
            for kind in ("unfiltered", "filtered"):
                entry = doc.get(kind)
                if entry and "spearman_r" in entry:
                    rows.append([stem, kind, repr(entry["spearman_r"]),
                                 repr(entry["slope"]), entry["n_points"]])
                    if kind == "unfiltered":
                        cls = _class_of(stem)
                        r = entry["spearman_r"]
                        if cls not in best or r > best[cls][0]:
                            best[cls] = (r, stem)
        _csv_table(outdir / "assortativity.csv",
                   ["instance", "graph", "spearman_r", "slope", "n_points"],
                   rows)
        produced.append("assortativity.csv")
        for cls, (_, stem) in sorted(best.items()):
            lf = campaign / "lons" / f"{stem}.lon.json"
            if not lf.exists():
                continue
            lon = load_lon(lf)
            fitness = {nd.id: nd.fitness for nd in lon.nodes}
            acc: dict[int, tuple[float, float]] = {}
            for (i, j), w in lon.edges.items():
                if i != j:
                    sw, swf = acc.get(i, (0.0, 0.0))
                    acc[i] = (sw + w, swf + w * fitness[j])
            xs = [fitness[i] for i in sorted(acc) if acc[i][0] > 0]
            ys = [acc[i][1] / acc[i][0] for i in sorted(acc) if acc[i][0] > 0]
            if len(xs) < 2:
                continue
            x = np.array(xs)
            y = np.array(ys)
            varx = float(((x - x.mean()) ** 2).sum())
            slope = float(((x - x.mean()) * (y - y.mean())).sum() / varx) \
                if varx else 0.0
            intercept = float(y.mean() - slope * x.mean())
            name = f"assort_{cls.replace('-', '')}.svg"
            (outdir / name).write_text(
                scatter(xs, ys, slope=slope, intercept=intercept,
                        title=f"fitness assortativity ({cls}: {stem})"),
                encoding="utf-8")
            produced.append(name)
    else:
        gaps.append("stats/*.assort.json missing: assortativity summary skipped")

    anova_path = campaign / "stats" / "anova.json"
    if anova_path.exists():
        doc = json.loads(anova_path.read_text())
        _csv_table(outdir / "anova.csv",
                   ["p_class", "p_algorithm", "p_interaction", "n_permutations"],
                   [[doc["p_class"], doc["p_algorithm"], doc["p_interaction"],
                     doc["n_permutations"]]])
        produced.append("anova.csv")

    report = {
        "kind": "report",
        "produced": sorted(produced),
        "gaps": gaps,
        "zero_community_instances": sorted(set(zero_community)),
        "provenance": provenance({"stage": "report"}, None),
    }
    out = outdir / "report.json"
    _write_json(out, report)
    return out
