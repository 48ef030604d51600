"""
Точка входа командной строки Aniso NS.
"""

import argparse
import json
import logging
import sys
from typing import List, Optional

from .commands.runner import EXIT_CONFIG, load_config, run_experiment, summarize
from .commands.schemas import ConfigError, ExperimentConfig
from .config import settings

logger = logging.getLogger(__name__)


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="aniso-ns",
        description="Эксперименты с анизотропными уравнениями Навье-Стокса",
    )
    parser.add_argument("--config", help="JSON-файл эксперимента")
    parser.add_argument("--out", help="Каталог вывода (заменяет output_dir конфигурации)")
    parser.add_argument("--seed", type=int, help="Базовое зерно (заменяет seed конфигурации)")
    parser.add_argument("--threads", type=int, help="Число потоков (по умолчанию ANISONS_THREADS)")
    parser.add_argument("--quiet", action="store_true", help="Только предупреждения и ошибки")
    parser.add_argument(
        "--print-schema", action="store_true", help="Напечатать JSON-схему конфигурации и выйти"
    )
    return parser


def configure_logging(quiet: bool) -> None:
    level = logging.WARNING if quiet else getattr(logging, settings.log_level.upper(), logging.INFO)
    logging.basicConfig(
        level=level,
        format="%(asctime)s - %(name)s - %(levelname)s - %(message)s",
        force=True,
    )


def main(argv: Optional[List[str]] = None) -> int:
    """
    Разобрать аргументы, выполнить эксперимент и вернуть код выхода.

    Коды: 0 - успех, 2 - ошибка конфигурации, 3 - остановка решателя,
    4 - провал проверок.
    """
    parser = build_parser()
    args = parser.parse_args(argv)
    configure_logging(args.quiet)

    if args.print_schema:
        print(json.dumps(ExperimentConfig.model_json_schema(), indent=2, ensure_ascii=False))
        return 0
    if not args.config:
        parser.print_usage(sys.stderr)
        logger.error("Не указан файл конфигурации (--config)")
        return EXIT_CONFIG
    if args.threads is not None:
        if args.threads < 1:
            logger.error("/threads: число потоков должно быть не меньше 1")
            return EXIT_CONFIG
        settings.threads = args.threads
    if args.seed is not None and args.seed < 0:
        logger.error("/seed: зерно должно быть неотрицательным")
        return EXIT_CONFIG

    try:
        config = load_config(args.config).with_overrides(seed=args.seed, output_dir=args.out)
    except ConfigError as e:
        for message in e.errors:
            logger.error(f"Ошибка конфигурации: {message}")
        return EXIT_CONFIG

    outcome = run_experiment(config)
    logger.info(summarize(outcome))
    return outcome.exit_code


def cli() -> None:
    sys.exit(main())


if __name__ == "__main__":
    cli()
