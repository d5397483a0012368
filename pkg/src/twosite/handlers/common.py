import logging
import sys
from typing import Any, Dict, Optional, Sequence, Type, TYPE_CHECKING

from ..output import render, render_mapping, write_text
from ..run_config import RunConfig

if TYPE_CHECKING:
    from ..service import CommandOptions, TwoSiteService

logger = logging.getLogger(__name__)


def _deliver(service: 'TwoSiteService', text: str, run: RunConfig, options: 'CommandOptions', count: int):
    path = service.resolve_output(run, options)
    if path is None:
        sys.stdout.write(text)
        return
    write_text(text, path)
    logger.info(f"Wrote {count} {options.fmt} record(s) to {path}")
    service.console.print(f"Wrote {count} record(s) to {path}", style="info")


def emit_records(service: 'TwoSiteService', records: Sequence[Any], record_type: Type, run: RunConfig,
                 options: 'CommandOptions', summary: Optional[Dict[str, Any]] = None):
    """Write records to --out / the run config's output path, or to stdout."""
    text = render(records, options.fmt, record_type, options.digits, summary)
    _deliver(service, text, run, options, len(records))


def emit_mapping(service: 'TwoSiteService', data: Dict[str, Any], run: RunConfig, options: 'CommandOptions'):
    _deliver(service, render_mapping(data, options.fmt, options.digits), run, options, 1)
