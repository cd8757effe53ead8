"""Command line front end: ``python -m wmds <command> <family> <rank> [options]``.

Every command prints one JSON document (or a short text summary with
``--format text``).  Exit status: 0 when every requested check holds, 1 when an
identity fails, 2 for a bad request, 3 when an enumeration cap is hit.
Reports are deterministic; wall-clock times appear only with ``--timing``.
"""

from __future__ import annotations

import argparse
import json
import sys
from dataclasses import dataclass, field

from .errors import ConstructionError, EnumerationLimitError, UnsupportedFieldError, UnsupportedNodeError, WMDSError

SCHEMA_VERSION = 1

EXIT_OK, EXIT_FAIL, EXIT_CONFIG, EXIT_CAP = 0, 1, 2, 3


class ConfigError(WMDSError):
    kind = "config"


@dataclass
class RunConfig:
    command: str
    family: str
    rank: int
    node: int | None = None  # 1-based, as on the command line
    q: int = 5
    degrees: tuple = ()
    cap: int | None = None
    threads: int = 1
    fmt: str = "json"
    output: str | None = None
    timing: bool = False
    extras: dict = field(default_factory=dict)

    @property
    def label(self):
        return f"{self.family}{self.rank}"

    def validate(self):
        if self.family not in "ABCDEFG" or len(self.family) != 1:
            raise ConfigError(f"unknown Cartan family {self.family!r}")
        if self.rank < 1:
            raise ConfigError("rank must be positive")
        if self.node is not None and not 1 <= self.node <= self.rank:
            raise ConfigError(f"node {self.node} out of range 1..{self.rank}")
        if self.threads < 1:
            raise ConfigError("--threads must be at least 1")
        if self.cap is not None and self.cap < 1:
            raise ConfigError("--cap must be positive")
        if self.fmt not in ("json", "text"):
            raise ConfigError("--format is json or text")
        return self


# ---------------------------------------------------------------------------
# commands


def _system(cfg):
    from .root_system import build_root_system

    return build_root_system(cfg.label)


def _nodes(cfg, rs, allowed, why="not admissible"):
    """0-based nodes to run: the requested one (checked) or all allowed ones."""
    if cfg.node is None:
        return list(allowed)
    i = cfg.node - 1
    if i not in allowed:
        raise UnsupportedNodeError(f"node {cfg.node} {why} for {rs.name}")
    return [i]


def _short_nodes(rs):
    return [i for i in range(rs.rank) if rs.is_short(rs.simple_roots[i])]


def cmd_zeta(cfg):
    from .zeta_average import zeta_direct, numerator_recursive, ZetaAverage

    rs = _system(cfg)
    method = cfg.extras.get("method", "direct")
    if method == "recursive":
        z = ZetaAverage(rs, numerator_recursive(rs), "recursive")
    else:
        z = zeta_direct(rs, threads=cfg.threads, cap=cfg.cap)
    rep = z.to_json(cfg.timing)
    return rep, True


def cmd_residue_check(cfg):
    from .residues import verify_theorem_A, verify_theorem_A_g2

    rs = _system(cfg)
    if rs.is_g2:
        nodes = _nodes(cfg, rs, [0, 1])
        reports = [verify_theorem_A_g2(i).to_json(cfg.timing) for i in nodes]
    else:
        nodes = _nodes(cfg, rs, _short_nodes(rs), "is long")
        reports = [verify_theorem_A(rs, i).to_json(cfg.timing) for i in nodes]
    ok = all(r["equal"] for r in reports)
    return {"system": rs.name, "checks": reports, "equal": ok}, ok


def cmd_cascade(cfg):
    from .cascade import build_cascade

    rs = _system(cfg)
    if rs.is_g2:
        raise ConfigError("cascades are defined for systems other than G2")
    nodes = _nodes(cfg, rs, _short_nodes(rs), "is long")
    graphs = []
    for i in nodes:
        g = build_cascade(rs, i)
        d = g.to_json()
        if cfg.extras.get("dot"):
            d["dot"] = g.to_dot()
        graphs.append(d)
    return {"system": rs.name, "cascades": graphs}, True


def cmd_kernel(cfg):
    from .cascade import admissible_nodes, kernel
    from .exact_algebra import render_factor, render_ratfunc

    rs = _system(cfg)
    if rs.is_g2:
        raise ConfigError("kernels are defined for systems other than G2")
    out = []
    for i in _nodes(cfg, rs, admissible_nodes(rs)):
        K = kernel(rs, i)
        factors = [render_factor(f) for f, m in sorted(K.den.items()) for _ in range(m)]
        out.append({"node": i + 1, "kernel": render_ratfunc(K), "factors": factors})
    return {"system": rs.name, "kernels": out}, True


def cmd_parabolic_check(cfg):
    from .cascade import admissible_nodes, theorem_D_report, verify_theorem_D_g2

    rs = _system(cfg)
    if rs.is_g2:
        if cfg.node not in (None, 2):
            raise UnsupportedNodeError(f"node {cfg.node} not admissible for G2 (use node 2)")
        ok = verify_theorem_D_g2()
        return {"system": "G2", "checks": [{"system": "G2", "node": 2, "equal": ok}], "equal": ok}, ok
    reports = [theorem_D_report(rs, i, cfg.cap).to_json(cfg.timing) for i in _nodes(cfg, rs, admissible_nodes(rs))]
    ok = all(r["equal"] for r in reports)
    return {"system": rs.name, "checks": reports, "equal": ok}, ok


def cmd_double_laced_check(cfg):
    from .zeta_average import short_root_substitution, verify_short_root_identity

    rs = _system(cfg)
    target, images = short_root_substitution(rs)
    ok = verify_short_root_identity(rs)
    return {"system": rs.name, "target": target, "images": [list(v) for v in images], "equal": ok}, ok


def cmd_global_check(cfg):
    from .global_mds import local_to_global_report

    rs = _system(cfg)
    d = cfg.degrees or (2,)
    if len(d) == 1:
        d = d * rs.rank
    if len(d) != rs.rank:
        raise ConfigError(f"--degrees needs 1 or {rs.rank} entries")
    rep = local_to_global_report(rs, cfg.q, d, cfg.threads, cfg.cap, cfg.timing)
    return rep, rep["equal"]


def cmd_tables(cfg):
    from .cascade import admissible_nodes, table_one
    from .root_system import orthogonal_complement

    rs = _system(cfg)
    rows = []
    for i in _nodes(cfg, rs, _short_nodes(rs), "is long"):
        od = orthogonal_complement(rs, i)
        row = od.to_json()
        row["type"] = od.type_string()
        rows.append(row)
    rep = {"system": rs.name, "orthogonal_complements": rows}
    ok = True
    if not rs.is_g2:
        computed = [i + 1 for i in admissible_nodes(rs)]
        published = list(table_one(rs))
        ok = computed == published
        rep["admissible_nodes"] = computed
        rep["admissible_nodes_published"] = published
        rep["admissible_match"] = ok
    return rep, ok


def cmd_invariants(cfg):
    from .cascade import admissible_nodes, build_cascade, is_chain
    from .residues import residue_invariant_report, all_checks_pass
    from .zeta_average import invariant_report, zeta_average

    rs = _system(cfg)
    z = zeta_average(rs)
    rep = {"system": rs.name, "zeta": invariant_report(z)}
    ok = all_checks_pass(rep["zeta"])
    if not rs.is_g2:
        res = {}
        for i in _nodes(cfg, rs, _short_nodes(rs), "is long"):
            res[str(i + 1)] = residue_invariant_report(rs, i)
        rep["residue"] = res
        ok &= all_checks_pass(res)
        casc = {}
        for i in admissible_nodes(rs):
            g = build_cascade(rs, i)
            casc[str(i + 1)] = {"chain": is_chain(g), "companions_consistent": g.consistent}
        rep["cascade"] = casc
        ok &= all_checks_pass(casc)
    rep["ok"] = bool(ok)
    return rep, bool(ok)


COMMANDS = {
    "zeta": (cmd_zeta, "zeta average Z and its numerator N"),
    "residue-check": (cmd_residue_check, "residue theorem at short nodes (G2 included)"),
    "cascade": (cmd_cascade, "cascade graph dump"),
    "kernel": (cmd_kernel, "cascade kernels at admissible nodes"),
    "parabolic-check": (cmd_parabolic_check, "parabolic-average identity (G2 included)"),
    "double-laced-check": (cmd_double_laced_check, "short-root substitution identity for B, C, F"),
    "global-check": (cmd_global_check, "function-field coefficient sums against Z"),
    "tables": (cmd_tables, "orthogonal complements and admissible nodes"),
    "invariants": (cmd_invariants, "property suite for Z, the residues and the cascades"),
}


def build_parser():
    p = argparse.ArgumentParser(prog="wmds", description=__doc__.splitlines()[0])
    sub = p.add_subparsers(dest="command", required=True)
    for name, (_, help_) in COMMANDS.items():
        s = sub.add_parser(name, help=help_)
        s.add_argument("family", help="Cartan family letter, A..G")
        s.add_argument("rank", type=int)
        s.add_argument("--node", type=int, help="1-based node (default: all applicable)")
        s.add_argument("--cap", type=int, help="enumeration cap (default: $WMDS_CAP or 10^7)")
        s.add_argument("--threads", type=int, default=1)
        s.add_argument("--format", dest="fmt", choices=("json", "text"), default="json")
        s.add_argument("--output", "-o", help="write the report here instead of stdout")
        s.add_argument("--timing", action="store_true", help="include wall-clock seconds")
        if name == "global-check":
            s.add_argument("--q", type=int, default=5)
            s.add_argument("--degrees", type=int, nargs="+", help="max degree per node (one value = all nodes)")
        if name == "zeta":
            s.add_argument("--method", choices=("direct", "recursive"), default="direct")
        if name == "cascade":
            s.add_argument("--dot", action="store_true", help="include a graphviz rendering")
    return p


def config_from_args(ns) -> RunConfig:
    extras = {k: getattr(ns, k) for k in ("method", "dot") if hasattr(ns, k)}
    return RunConfig(
        command=ns.command,
        family=ns.family.upper(),
        rank=ns.rank,
        node=ns.node,
        q=getattr(ns, "q", 5),
        degrees=tuple(getattr(ns, "degrees", None) or ()),
        cap=ns.cap,
        threads=ns.threads,
        fmt=ns.fmt,
        output=ns.output,
        timing=ns.timing,
        extras=extras,
    ).validate()


def _render_text(rep, ok):
    lines = [f"{k}: {v}" for k, v in rep.items() if not isinstance(v, (list, dict))]
    lines.append("PASS" if ok else "FAIL")
    return "\n".join(lines) + "\n"


def dispatch(cfg: RunConfig) -> tuple:
    """Run one command; returns (exit status, report dict)."""
    fn, _ = COMMANDS[cfg.command]
    try:
        rep, ok = fn(cfg)
        status = EXIT_OK if ok else EXIT_FAIL
    except EnumerationLimitError as e:
        rep, status = {"error": "cap", "message": str(e), "needed": e.needed, "cap": e.cap}, EXIT_CAP
    except (ConfigError, ConstructionError, UnsupportedNodeError, UnsupportedFieldError) as e:
        rep, status = {"error": e.kind, "message": str(e)}, EXIT_CONFIG
    except WMDSError as e:
        rep, status = {"error": e.kind, "message": str(e)}, EXIT_CONFIG
    out = {"schema": SCHEMA_VERSION, "command": cfg.command, "system": cfg.label}
    out.update(rep)
    return status, out


def main(argv=None) -> int:
    parser = build_parser()
    ns = parser.parse_args(argv)
    try:
        cfg = config_from_args(ns)
    except (ConfigError, ValueError) as e:
        print(json.dumps({"schema": SCHEMA_VERSION, "error": "config", "message": str(e)}), file=sys.stderr)
        return EXIT_CONFIG
    status, rep = dispatch(cfg)
    if cfg.fmt == "json":
        text = json.dumps(rep, sort_keys=True, indent=2) + "\n"
    else:
        text = _render_text(rep, status == EXIT_OK)
    if cfg.output:
        with open(cfg.output, "w") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)
    if status == EXIT_CONFIG and "message" in rep:
        print(rep["message"], file=sys.stderr)
    return status


if __name__ == "__main__":
    sys.exit(main())
