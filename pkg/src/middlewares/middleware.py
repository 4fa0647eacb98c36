"""Wraps every verb handler and turns its outcome into the process exit code."""
import logging
from typing import Callable

from src.errors import SiloError

log = logging.getLogger("silo.cli")

EXIT_OK = 0
EXIT_ALARM = 1
EXIT_ERROR = 2


class AlarmMiddleware:
    """0 when every row finished without alarms, 1 for alarms or missing rows, 2 for unexpected errors."""

    def __call__(self, handler: Callable, args) -> int:
        try:
            result = handler(args)
        except SiloError as exc:
            log.error(f"{args.verb} failed: {exc}")
            return EXIT_ALARM
        except Exception:
            log.exception(f"{args.verb} crashed")
            return EXIT_ERROR

        if result is None:
            return EXIT_OK
        for alarm in result.alarms:
            log.warning(f"{result.name}: {alarm}")
        if result.missing:
            log.warning(f"{result.name}: {len(result.missing)} of {len(result.rows)} rows missing")
        if result.alarms or result.missing:
            return EXIT_ALARM
        log.info(f"{result.name}: all {len(result.rows)} rows completed, results in {result.out_dir}")
        return EXIT_OK
