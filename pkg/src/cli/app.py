"""
Command-line surface tying the pipeline together.

Exit codes: 0 success, 1 usage error, 2 validation error. Errors are reported
on stderr as a single ``ERR:<code>:<message>`` line.
"""
import argparse
import logging
import sys
from pathlib import Path
from typing import Callable, Dict, List, Optional, Sequence

import numpy as np

from src.adapters.tensor_file import write_tensor
from src.adapters.text_formats import write_csv, write_grid_csv, write_pgm
from src.analysis.attention import parse_head_agg
from src.core.analysis_service import AnalysisService
from src.core.errors import SimignoreError, UsageError
from src.cli.models import load_manifest
from src.utils.config import AppConfig, app_config
from src.utils.resources import configure_logging, thread_limit

logger = logging.getLogger(__name__)


class CliParser(argparse.ArgumentParser):
    """ArgumentParser that raises instead of exiting on bad usage"""

    def error(self, message):
        raise UsageError(message)


def _int_list(text: str) -> List[int]:
    try:
        return [int(part) for part in text.split(",") if part.strip()]
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected comma-separated integers, got {text!r}") from None


def _head_agg(text: str):
    try:
        return parse_head_agg(text)
    except SimignoreError as error:
        raise argparse.ArgumentTypeError(str(error)) from None


def _split_outputs(text: str) -> List[str]:
    return [part for part in text.split(",") if part]


def create_parser() -> CliParser:
    """Build the argument parser with one subparser per workflow"""
    selection = app_config.selection
    parser = CliParser(prog="simignore", description="Simignore image-token selection toolkit")
    parser.add_argument("--verbose", action="store_true", help="Log progress at INFO level")
    parser.add_argument("--debug", action="store_true", help="Log at DEBUG level")
    sub = parser.add_subparsers(dest="command", parser_class=CliParser)

    def command(name: str, help_text: str) -> CliParser:
        p = sub.add_parser(name, help=help_text)
        p.add_argument("--manifest", required=True, help="Run manifest (JSON)")
        p.add_argument("--out", required=True, help="Output file")
        return p

    command("select", "Rank image tokens and flag the kept ones (CSV)")
    command("mask", "Write the attention mask as a 1-D tensor file")

    p = command("heatmap", "Image-token influence heat map (.pgm, .csv, .png; comma-separated)")
    p.add_argument("--query", default=app_config.attention.default_query, help="'last' or a query index")
    p.add_argument("--head-agg", type=_head_agg, default=app_config.attention.default_head_agg,
                   help="'mean', 'max' or a head index")

    p = command("cluster", "Project, cluster and overlay ignored tokens (CSV)")
    p.add_argument("--k", type=int, default=app_config.clusters.default_k)
    p.add_argument("--seed", type=int, default=None, help="Defaults to the manifest seed")
    p.add_argument("--mode", choices=("2d", "full"), default=app_config.clusters.default_mode)
    p.add_argument("--ignore-clusters", type=_int_list, default=None,
                   help="Comma-separated cluster ids to ignore (requires --mask-out)")
    p.add_argument("--mask-out", default=None, help="Mask file for --ignore-clusters")
    p.add_argument("--plot", default=None, help="Optional PNG scatter")

    p = command("ablate", "Ignore a band of image tokens by importance (CSV)")
    p.add_argument("--band", required=True, choices=selection.bands)
    p.add_argument("--ignore", required=True, type=int)
    p.add_argument("--trials", type=int, default=selection.default_trials,
                   help="Repetitions of the random band over consecutive seeds")

    p = command("sweep", "Kept sets, popcounts and compute across ignored counts (CSV)")
    p.add_argument("--ignore-list", type=_int_list,
                   default=list(app_config.sweep.default_ignore_list))

    p = command("scatter", "Image and text tokens in the shared cosine metric space (CSV)")
    p.add_argument("--plot", default=None, help="Optional PNG scatter")
    return parser


def _cmd_select(service: AnalysisService, args, manifest) -> None:
    selection = service.select(manifest)
    write_csv(args.out, ("image_index", "score", "kept"), service.selection_rows(selection))


def _cmd_mask(service: AnalysisService, args, manifest) -> None:
    token_mask = service.mask(manifest)
    write_tensor(token_mask.bits.astype(np.float32), args.out)
    logger.info("mask popcount %d of %d", token_mask.popcount(), len(token_mask))


def _cmd_heatmap(service: AnalysisService, args, manifest) -> None:
    query = args.query if args.query == "last" else _parse_int(args.query, "--query")
    grid, summary = service.heatmap(manifest, query, args.head_agg)
    logger.info("shares sys=%.6f img=%.6f usr=%.6f", summary.sys_share, summary.img_share, summary.usr_share)
    outputs = _split_outputs(args.out)
    for out in outputs:
        suffix = Path(out).suffix.lower()
        if suffix == ".pgm":
            write_pgm(out, grid.values, app_config.attention.pgm_max_value)
        elif suffix == ".csv":
            write_grid_csv(out, grid.values)
        else:
            renderer = service.registry.find_renderer(suffix.lstrip("."))
            if renderer is None:
                raise UsageError(f"no writer for heat-map output '{out}'")
            renderer.render(grid, out)


def _cmd_cluster(service: AnalysisService, args, manifest) -> None:
    if (args.ignore_clusters is None) != (args.mask_out is None):
        raise UsageError("--ignore-clusters and --mask-out must be given together")
    report = service.cluster(manifest, args.k, args.seed, args.mode, args.ignore_clusters)
    ignored = set(report.ignored)
    points = report.projection.points
    rows = [(i, points[i, 0], points[i, 1], int(report.assignment.labels[i]), i in ignored)
            for i in range(points.shape[0])]
    write_csv(args.out, ("index", "x", "y", "label", "ignored"), rows)
    logger.info("cluster sizes %s, ignored per cluster %s", report.assignment.sizes(), report.overlap)
    if args.mask_out is not None:
        from src.core.selection import build_mask
        from src.core.token_space import make_segmentation
        seg = make_segmentation(manifest.n_sys, manifest.n_img, manifest.n_usr)
        token_mask = build_mask(seg, report.kept_after_cluster_ignore)
        write_tensor(token_mask.bits.astype(np.float32), args.mask_out)
    if args.plot:
        highlight = np.array([i in ignored for i in range(points.shape[0])])
        _scatter_renderer(service).render_scatter(points, args.plot,
                                                  labels=report.assignment.labels, highlight=highlight)


def _cmd_ablate(service: AnalysisService, args, manifest) -> None:
    selections = service.ablate(manifest, args.band, args.ignore, args.trials)
    rows = []
    for trial, selection in enumerate(selections):
        kept = set(selection.kept_image_indices)
        for image_index, score, _ in service.selection_rows(selection):
            rows.append((trial, image_index, score, image_index in kept))
    write_csv(args.out, ("trial", "image_index", "score", "kept"), rows)


def _cmd_sweep(service: AnalysisService, args, manifest) -> None:
    rows = service.sweep(manifest, args.ignore_list)
    write_csv(
        args.out,
        ("ignore", "kept_count", "mask_popcount", "active_keys", "mac_count", "degenerate_rows", "kept"),
        [(r.ignore, len(r.kept), r.popcount, r.active_keys, r.mac_count, r.degenerate_rows,
          " ".join(str(i) for i in r.kept)) for r in rows],
    )


def _cmd_scatter(service: AnalysisService, args, manifest) -> None:
    joint = service.scatter(manifest)
    rows = [(i, "image", x, y) for i, (x, y) in enumerate(joint.image_points)]
    rows += [(j, "text", x, y) for j, (x, y) in enumerate(joint.text_points)]
    write_csv(args.out, ("index", "kind", "x", "y"), rows)
    if args.plot:
        _scatter_renderer(service).render_scatter(joint.image_points, args.plot,
                                                  extra_points=joint.text_points)


def _scatter_renderer(service: AnalysisService):
    renderer = service.registry.find_renderer("png")
    if renderer is None:
        raise UsageError("PNG rendering is unavailable (matplotlib not installed)")
    return renderer


def _parse_int(text: str, flag: str) -> int:
    try:
        return int(text)
    except ValueError:
        raise UsageError(f"{flag} expects 'last' or an integer, got {text!r}") from None


COMMANDS: Dict[str, Callable] = {
    "select": _cmd_select,
    "mask": _cmd_mask,
    "heatmap": _cmd_heatmap,
    "cluster": _cmd_cluster,
    "ablate": _cmd_ablate,
    "sweep": _cmd_sweep,
    "scatter": _cmd_scatter,
}


def _report(error: SimignoreError, stream) -> int:
    message = " ".join(str(error).split())
    stream.write(f"ERR:{error.code}:{message}\n")
    return error.exit_code


def run(argv: Optional[Sequence[str]] = None, stderr=None) -> int:
    """Parse ``argv``, run one subcommand and return the exit code"""
    stderr = sys.stderr if stderr is None else stderr
    try:
        config = AppConfig.from_env()
        args = create_parser().parse_args(argv)
        level = "DEBUG" if args.debug else "INFO" if args.verbose else config.runtime.log_level
        configure_logging(level)
        if args.command is None:
            raise UsageError("a subcommand is required: " + ", ".join(COMMANDS))
        manifest = load_manifest(args.manifest)
        service = AnalysisService()
        with thread_limit(config.runtime.threads):
            COMMANDS[args.command](service, args, manifest)
    except SimignoreError as error:
        return _report(error, stderr)
    except OSError as error:
        stderr.write(f"ERR:IOError:{' '.join(str(error).split())}\n")
        return 2
    return 0


def main() -> None:
    sys.exit(run())
