"""Command-line client for the experiment service.

The CLI never computes anything itself: it assembles a request from the
config file and flags, posts it to the HTTP API (in-process over an ASGI
transport by default, or to ``--server URL``), and writes the returned
documents to disk.  Exit codes: 0 success, 2 configuration error,
3 runtime error.
"""

from __future__ import annotations

import argparse
import json
import os
import sys
import tempfile

import anyio
import httpx

from .config import ExperimentConfig
from .errors import ConfigError

EXIT_OK = 0
EXIT_CONFIG = 2
EXIT_RUNTIME = 3


def _post(path: str, payload: dict, server: str | None) -> dict:
    """POST to a live server, or straight into the in-process app."""
    if server is not None:
        with httpx.Client(base_url=server, timeout=600.0) as client:
            resp = client.post(path, json=payload)
        return _unwrap(resp)

    from .service import create_app

    async def call() -> httpx.Response:
        transport = httpx.ASGITransport(app=create_app())
        async with httpx.AsyncClient(
            transport=transport, base_url="http://wsntopo.local", timeout=600.0
        ) as client:
            return await client.post(path, json=payload)

    return _unwrap(anyio.run(call))


def _unwrap(resp: httpx.Response) -> dict:
    if resp.status_code in (400, 422):
        raise ConfigError(json.dumps(resp.json().get("detail", resp.text)))
    if resp.status_code != 200:
        raise RuntimeError(f"service returned {resp.status_code}: {resp.text[:500]}")
    return resp.json()


def _atomic_write(path: str, text: str) -> None:
    directory = os.path.dirname(path) or "."
    os.makedirs(directory, exist_ok=True)
    fd, tmp = tempfile.mkstemp(dir=directory, suffix=".tmp")
    try:
        with os.fdopen(fd, "w", newline="") as fh:
            fh.write(text)
        os.replace(tmp, path)
    except BaseException:
        if os.path.exists(tmp):
            os.unlink(tmp)
        raise


def _dump_json(doc) -> str:
    return json.dumps(doc, indent=None, separators=(",", ":")) + "\n"


def _load_config(args: argparse.Namespace) -> ExperimentConfig:
    data: dict = {}
    if args.config:
        with open(args.config) as fh:
            data = json.load(fh)
    cfg = ExperimentConfig(**data)
    updates = cfg.model_dump()
    if args.seed is not None:
        updates["seed"] = args.seed
    if args.replicates is not None:
        updates["replicates"] = args.replicates
    if args.out is not None:
        updates["out_dir"] = args.out
    override_map = {
        "n": ("deployment", "n"),
        "side": ("deployment", "side"),
        "radius": ("deployment", "r"),
        "m0": ("laee", "m0"),
        "e0": ("laee", "e0"),
        "k_max": ("laee", "k_max"),
        "e_min": ("energy", "e_min"),
        "e_max": ("energy", "e_max"),
        "knn_k": ("baselines", "knn_k"),
        "p_head": ("baselines", "leach_p_head"),
        "trials": ("sweep", "trials"),
    }
    for flag, (section, field) in override_map.items():
        value = getattr(args, flag, None)
        if value is not None:
            updates[section][field] = value
    if getattr(args, "m_values", None):
        updates["laee"]["m_values"] = tuple(
            int(v) for v in args.m_values.split(",") if v
        )
    if getattr(args, "fractions", None):
        updates["sweep"]["fractions"] = tuple(
            float(v) for v in args.fractions.split(",") if v
        )
    return ExperimentConfig(**updates)


def cmd_generate(args: argparse.Namespace) -> int:
    cfg = _load_config(args)
    payload = {"config": cfg.model_dump(), "model": args.model, "m": args.m}
    result = _post("/api/generate", payload, args.server)
    out = cfg.out_dir
    tag = result["model"].replace("+", "_")
    if args.m is not None:
        tag = f"{tag}_m{args.m}"
    for rep in range(len(result["graphs"])):
        _atomic_write(
            os.path.join(out, f"deployment_r{rep:03d}.json"),
            _dump_json(result["deployments"][rep]),
        )
        _atomic_write(
            os.path.join(out, f"{tag}_r{rep:03d}.json"),
            _dump_json(result["graphs"][rep]),
        )
        if result["reports"][rep] is not None:
            _atomic_write(
                os.path.join(out, f"{tag}_r{rep:03d}_report.json"),
                _dump_json(result["reports"][rep]),
            )
    for row in result["stats"]:
        print(
            f"{result['label']} rep {row['replicate']}: nodes={row['nodes']} "
            f"edges={row['edges']} avg={row['avg_degree']:.4g} "
            f"min={row['min_degree']} max={row['max_degree']}"
        )
    print(f"wrote {2 * len(result['graphs'])}+ files under {out}")
    return EXIT_OK


def cmd_table2(args: argparse.Namespace) -> int:
    cfg = _load_config(args)
    result = _post("/api/table2", {"config": cfg.model_dump()}, args.server)
    path = os.path.join(cfg.out_dir, "table2.csv")
    _atomic_write(path, result["csv"])
    for row in result["rows"]:
        print(
            f"{row['model']}: avg={row['avg_degree_mean']:.4g}"
            f"±{row['avg_degree_std']:.3g} min={row['min_degree_mean']:.4g} "
            f"max={row['max_degree_mean']:.4g}"
        )
    print(f"wrote {path}")
    return EXIT_OK


def cmd_fig2(args: argparse.Namespace) -> int:
    cfg = _load_config(args)
    result = _post("/api/fig2", {"config": cfg.model_dump()}, args.server)
    for name, text in sorted(result["files"].items()):
        _atomic_write(os.path.join(cfg.out_dir, name), text)
    for m, stats in sorted(result["ks_stats"].items(), key=lambda kv: int(kv[0])):
        frac = result["sub_m_fraction"][m]
        print(
            f"m={m}: KS mean={stats['mean']:.4f} std={stats['std']:.4f} "
            f"over {stats['replicates']} replicates; degree<m fraction={frac:.4f}"
        )
    print(f"wrote {len(result['files'])} files under {cfg.out_dir}")
    return EXIT_OK


def cmd_fig3(args: argparse.Namespace) -> int:
    cfg = _load_config(args)
    result = _post("/api/fig3", {"config": cfg.model_dump()}, args.server)
    path = os.path.join(cfg.out_dir, "fig3.csv")
    _atomic_write(path, result["csv"])
    models = []
    for row in result["rows"]:
        if row["model"] not in models:
            models.append(row["model"])
    print(f"swept {len(models)} models over {len(result['rows'])} grid points")
    print(f"wrote {path}")
    return EXIT_OK


def cmd_analyze(args: argparse.Namespace) -> int:
    with open(args.graph_file) as fh:
        doc = json.load(fh)
    payload = {"graph": doc, "sink": args.sink}
    result = _post("/api/analyze", payload, args.server)
    view = "out-degree" if result["directed"] else "degree"
    print(
        f"nodes={result['node_count']} edges={result['edge_count']} "
        f"{view}: avg={result['avg_degree']:.4g} min={result['min_degree']} "
        f"max={result['max_degree']}"
    )
    line = f"giant component: {result['gc_size']} ({result['gc_fraction']:.4g})"
    if result["sink_component_size"] is not None:
        line += f"; sink component: {result['sink_component_size']}"
    print(line)
    return EXIT_OK


def cmd_serve(args: argparse.Namespace) -> int:
    import uvicorn

    from .service import create_app

    uvicorn.run(create_app(), host=args.host, port=args.port)
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="wsntopo",
        description="Construct sensor-network topologies and analyze their "
        "degree distributions and random-failure robustness.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    def add_common(p: argparse.ArgumentParser, with_overrides: bool = True):
        p.add_argument("--config", help="JSON experiment config file")
        p.add_argument("--seed", type=int, help="base seed")
        p.add_argument("--replicates", type=int, help="replicate count")
        p.add_argument("--out", help="output directory")
        p.add_argument("--server", help="base URL of a running service")
        if with_overrides:
            p.add_argument("--n", type=int, help="node count")
            p.add_argument("--side", type=float, help="region side (m)")
            p.add_argument("--radius", type=float, help="transmission range (m)")
            p.add_argument("--m0", type=int, help="seed topology node count")
            p.add_argument("--e0", type=int, help="seed topology link count")
            p.add_argument("--k-max", dest="k_max", type=int, help="degree cap")
            p.add_argument("--e-min", dest="e_min", type=float, help="energy lower bound (J)")
            p.add_argument("--e-max", dest="e_max", type=float, help="energy upper bound (J)")
            p.add_argument("--knn-k", dest="knn_k", type=int, help="neighbors per node in KNN")
            p.add_argument("--p-head", dest="p_head", type=float, help="cluster-head probability")
            p.add_argument("--trials", type=int, help="removal trials per fraction")
            p.add_argument("--m-values", dest="m_values", help="comma list of link budgets")
            p.add_argument("--fractions", help="comma list of removal fractions")

    p_gen = sub.add_parser("generate", help="build one model's topologies")
    add_common(p_gen)
    p_gen.add_argument(
        "--model",
        required=True,
        choices=["laee", "udg", "knn", "dtg", "leach+knn", "leach+dtg", "ba"],
    )
    p_gen.add_argument("--m", type=int, help="links per newcomer (laee/ba)")
    p_gen.set_defaults(fn=cmd_generate)

    p_t2 = sub.add_parser("table2", help="degree statistics for every model")
    add_common(p_t2)
    p_t2.set_defaults(fn=cmd_table2)

    p_f2 = sub.add_parser("fig2", help="degree distributions vs. theory")
    add_common(p_f2)
    p_f2.set_defaults(fn=cmd_fig2)

    p_f3 = sub.add_parser("fig3", help="random-failure robustness curves")
    add_common(p_f3)
    p_f3.set_defaults(fn=cmd_fig3)

    p_an = sub.add_parser("analyze", help="stats of an existing graph file")
    p_an.add_argument("graph_file")
    p_an.add_argument("--sink", type=int, help="sink node id")
    p_an.add_argument("--server", help="base URL of a running service")
    p_an.set_defaults(fn=cmd_analyze)

    p_srv = sub.add_parser("serve", help="run the HTTP service")
    p_srv.add_argument("--host", default="127.0.0.1")
    p_srv.add_argument("--port", type=int, default=8000)
    p_srv.set_defaults(fn=cmd_serve)

    return parser


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.fn(args)
    except ConfigError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except (ValueError, TypeError) as exc:
        # pydantic validation and malformed inputs are config problems
        print(f"config error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except FileNotFoundError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except Exception as exc:  # noqa: BLE001 - the CLI boundary maps everything
        print(f"runtime error: {exc}", file=sys.stderr)
        return EXIT_RUNTIME


if __name__ == "__main__":
    sys.exit(main())
