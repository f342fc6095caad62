#!/usr/bin/env python3
# -*- coding: utf-8 -*-
"""
命令列介面
simulate / montecarlo / sweep / calibrate-zu0 / presets / validate

結束碼：0 成功、1 執行失敗、2 用法錯誤；診斷訊息輸出到 stderr，結果輸出到 stdout。
"""

import argparse
import sys
from pathlib import Path
from typing import Any, List, Optional, Sequence, Tuple

from .core.config import config_manager
from .core.scenario_loader import config_hash, dump_config, preset_summary, resolve_scenario
from .models.enums import PresetPath, SweepParameter
from .models.errors import ConfigValidationError, PensionSimError
from .models.params import ScenarioConfig
from .models.results import SweepResult, SweepSpec
from .simulator import PensionSimulator, calibrate_zu0, select_preset_path, single_path_frame
from .utils.logger import set_global_level, setup_logger
from .utils.report import ReportGenerator
from .utils.validators import validate_scenario_text
from . import __version__

# 建立日誌器
logger = setup_logger(__name__)

EXIT_OK = 0
EXIT_FAILURE = 1
EXIT_USAGE = 2


class UsageError(Exception):
    """參數組合錯誤（結束碼 2）"""


def _add_scenario_args(parser: argparse.ArgumentParser):
    parser.add_argument('scenario', nargs='?', help="預設名稱或 YAML 情境檔")
    parser.add_argument('--preset', help="內建情境名稱")
    parser.add_argument('--config', help="YAML 情境檔路徑")
    parser.add_argument('--seed', type=int, help="覆寫 master_seed")


def _add_output_args(parser: argparse.ArgumentParser):
    parser.add_argument('--out', help="輸出目錄（預設為 output.directory/<標籤>）")


def build_parser() -> argparse.ArgumentParser:
    """建立參數解析器"""
    parser = argparse.ArgumentParser(prog='pension-sim',
                                     description="混合式 PAYG + 緩衝基金退休金模擬")
    parser.add_argument('--version', action='version', version=f"%(prog)s {__version__}")
    parser.add_argument('--log-level', default=None,
                        choices=['DEBUG', 'INFO', 'WARNING', 'ERROR', 'CRITICAL'])
    sub = parser.add_subparsers(dest='command', metavar='command')
    sub.required = True

    p = sub.add_parser('simulate', help="單一路徑完整時間序列")
    _add_scenario_args(p)
    _add_output_args(p)
    p.add_argument('--path', default=PresetPath.OPTIMISTIC.value,
                   help="optimistic、pessimistic 或路徑編號")

    p = sub.add_parser('montecarlo', help="蒙地卡羅模擬")
    _add_scenario_args(p)
    _add_output_args(p)
    p.add_argument('--paths', type=int, help="覆寫 n_paths")
    p.add_argument('--workers', type=int, help="工作進程數上限（不影響結果）")
    p.add_argument('--write-paths', action='store_true', help="輸出逐路徑資料")
    p.add_argument('--error-policy', choices=['fail_fast', 'skip_and_report'])

    p = sub.add_parser('sweep', help="參數掃描（共同隨機數）")
    _add_scenario_args(p)
    _add_output_args(p)
    p.add_argument('--parameter', required=True, choices=[s.value for s in SweepParameter])
    p.add_argument('--values', nargs='*', default=[],
                   help="掃描值；delta 以逗號分隔，例如 0,-0.2,-0.2,-0.2；f0 可寫成 1.5c0")
    p.add_argument('--lambda-values', nargs='+', type=float,
                   help="與 f0 掃描組成 F0 × λ 網格")
    p.add_argument('--independent-seeds', action='store_true', help="第 i 點使用 master_seed + i")
    p.add_argument('--recalibrate', type=float, metavar='TARGET',
                   help="θ 掃描時以此初始相對盈餘重新校準 Z^u_0")
    p.add_argument('--paths', type=int, help="覆寫 n_paths")
    p.add_argument('--workers', type=int)

    p = sub.add_parser('calibrate-zu0', help="以初始相對盈餘校準 Z^u_0")
    _add_scenario_args(p)
    p.add_argument('--target', type=float, default=None, help="初始相對盈餘（例如 0.05）")

    sub.add_parser('presets', help="列出內建情境")

    p = sub.add_parser('validate', help="只驗證情境配置")
    _add_scenario_args(p)
    return parser


def _load_scenario(args: argparse.Namespace) -> Tuple[ScenarioConfig, str]:
    sources = [s for s in (args.preset, args.config, args.scenario) if s]
    if len(sources) != 1:
        raise UsageError("exactly one of SCENARIO, --preset or --config is required")
    if args.preset and args.preset not in config_manager.list_presets():
        raise ConfigValidationError(f"unknown preset '{args.preset}'", key='preset')
    if args.config and not Path(args.config).exists():
        raise OSError(2, "scenario file not found", args.config)
    config, label = resolve_scenario(sources[0])
    if args.seed is not None:
        config = config.with_updates(master_seed=args.seed)
    if getattr(args, 'paths', None) is not None:
        config = config.with_updates(n_paths=args.paths)
    return config, label


def _out_dir(args: argparse.Namespace, label: str) -> Path:
    if args.out:
        return Path(args.out)
    base = config_manager.get_output_config().get('directory', 'results/')
    return Path(base) / label


def _parse_sweep_values(parameter: SweepParameter, raw: Sequence[str]) -> List[Any]:
    if parameter in (SweepParameter.ZU0, SweepParameter.THETA, SweepParameter.LAMBDA):
        try:
            return [float(v) for v in raw]
        except ValueError as e:
            raise ConfigValidationError(f"sweep values must be numbers: {e}", key='sweep.values') from None
    if parameter is SweepParameter.DELTA_VECTOR:
        values = []
        for v in raw:
            try:
                vector = [float(x) for x in v.split(',')]
            except ValueError:
                raise ConfigValidationError(f"invalid delta vector '{v}'", key='sweep.values') from None
            values.append(vector)
        return values
    return list(raw)


def cmd_simulate(args: argparse.Namespace) -> int:
    config, label = _load_scenario(args)
    ranking = int(config_manager.get_harness_config().get('preset_ranking_paths', 100))
    try:
        choice = PresetPath(args.path)
        path_index = select_preset_path(config, choice, ranking)
        name = choice.value
    except ValueError:
        try:
            path_index = int(args.path)
        except ValueError:
            raise UsageError(f"--path must be optimistic, pessimistic or an integer, got '{args.path}'")
        if path_index < 0:
            raise UsageError("--path must be >= 0")
        name = f"path{path_index}"

    frame = single_path_frame(config, path_index)
    out = _out_dir(args, f"{label}_{name}")
    meta = {'label': label, 'path': name, 'path_index': path_index, 'config_hash': config_hash(config),
            'master_seed': config.master_seed, 'engine_version': __version__}
    ReportGenerator().emit_single_path(frame, meta, out)

    depleted = frame['depleted'].to_numpy()
    tau = float(frame['time'][depleted.argmax()]) if depleted.any() else float('inf')
    print(f"path_index={path_index}")
    print(f"tau={tau:g}")
    print(f"output={out}")
    return EXIT_OK


def cmd_montecarlo(args: argparse.Namespace) -> int:
    config, label = _load_scenario(args)
    simulator = PensionSimulator(max_workers=args.workers, error_policy=args.error_policy)
    bundle = simulator.run_scenario(config, write_paths=args.write_paths, label=label)
    out = _out_dir(args, label)
    ReportGenerator().emit_results(bundle, out)

    tau = bundle.summary.tau_moments
    print(f"paths={bundle.summary.n_paths}")
    print(f"tau_mean={tau['mean']:.6g} tau_median={tau['median']:.6g} tau_variance={tau['variance']:.6g}")
    for row in bundle.summary.eair_rows:
        print(f"eair t={row.t:g} y_bf={row.y_bf:.6g} y_min={row.y_min:.6g} delta={row.delta:.6g}")
    print(f"summary_checksum={bundle.manifest.checksums['summary.json']}")
    print(f"output={out}")
    return EXIT_OK


def cmd_sweep(args: argparse.Namespace) -> int:
    base, label = _load_scenario(args)
    parameter = SweepParameter(args.parameter)
    values = _parse_sweep_values(parameter, args.values)
    out = _out_dir(args, f"{label}_sweep_{parameter.value}")
    simulator = PensionSimulator(max_workers=args.workers)
    reporter = ReportGenerator()

    if args.lambda_values:
        if parameter is not SweepParameter.F0:
            raise UsageError("--lambda-values only combines with --parameter f0")
        result = simulator.run_grid(base, values, args.lambda_values)
    elif not values:
        logger.warning("⚠️ 掃描值為空，只輸出執行清單與空表格")
        result = SweepResult(parameter=parameter.value, points=[], bundles=[],
                             manifest=simulator.sweep_manifest(base))
    else:
        spec = SweepSpec(parameter=parameter, values=values, base=base,
                         shared_seed=not args.independent_seeds, recalibrate_target=args.recalibrate)
        result = simulator.run_sweep(spec)

    reporter.emit_sweep_results(result, out)
    print(result.table().to_csv(index=False, float_format='%.6g', lineterminator='\n'), end='')
    print(f"output={out}")
    return EXIT_OK


def cmd_calibrate(args: argparse.Namespace) -> int:
    config, _ = _load_scenario(args)
    target = args.target
    if target is None:
        target = float(config_manager.get_calibration_config().get('default_target', 0.05))
    zu0 = calibrate_zu0(config, target)
    print(f"{zu0:.12g}")
    return EXIT_OK


def cmd_presets(args: argparse.Namespace) -> int:
    for name in config_manager.list_presets():
        info = preset_summary(name)
        print(f"{name}\t{info['demographics']}\tzu0={info['zu0']}\tdelta={info['delta']}\t"
              f"omega={info['omega_kind']}\t{info['description']}")
    return EXIT_OK


def cmd_validate(args: argparse.Namespace) -> int:
    sources = [s for s in (args.preset, args.config, args.scenario) if s]
    if len(sources) != 1:
        raise UsageError("exactly one of SCENARIO, --preset or --config is required")
    source = sources[0]
    if source in config_manager.list_presets() and not args.config:
        config, _ = resolve_scenario(source)
        result = validate_scenario_text(dump_config(config), source)
    else:
        path = Path(source)
        text = path.read_text(encoding='utf-8')
        result = validate_scenario_text(text, str(path))

    for warning in result['warnings']:
        print(f"warning: {warning}", file=sys.stderr)
    if not result['is_valid']:
        for issue in result['issues']:
            print(f"error: ConfigValidationError: {issue}", file=sys.stderr)
        return EXIT_FAILURE
    print(f"ok: {source} (initial relative surplus {result['initial_relative_surplus']:.6g})")
    return EXIT_OK


COMMANDS = {
    'simulate': cmd_simulate,
    'montecarlo': cmd_montecarlo,
    'sweep': cmd_sweep,
    'calibrate-zu0': cmd_calibrate,
    'presets': cmd_presets,
    'validate': cmd_validate,
}


def cli_dispatch(argv: Optional[Sequence[str]] = None) -> int:
    """
    命令列分派

    Returns:
        結束碼（0 成功、1 執行失敗、2 用法錯誤）
    """
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as e:
        # argparse 在 --help/--version 時以 0 結束，其餘為用法錯誤
        return EXIT_OK if e.code in (0, None) else EXIT_USAGE

    if args.log_level:
        set_global_level(args.log_level)

    try:
        return COMMANDS[args.command](args)
    except UsageError as e:
        parser.print_usage(sys.stderr)
        print(f"error: usage: {e}", file=sys.stderr)
        return EXIT_USAGE
    except (PensionSimError, OSError) as e:
        print(f"error: {type(e).__name__}: {e}", file=sys.stderr)
        return EXIT_FAILURE
