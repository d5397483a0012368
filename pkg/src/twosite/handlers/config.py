import json
import logging
from typing import Optional, TYPE_CHECKING

from rich.panel import Panel

from ..errors import EXIT_INVALID, EXIT_OK

if TYPE_CHECKING:
    from ..service import TwoSiteService

logger = logging.getLogger(__name__)


# --- Config Handlers ---
def handle_config_show(service: 'TwoSiteService', section: Optional[str] = None) -> int:
    """Print one section, or every section when none (or 'all') is given."""
    if section is None or section.lower() == 'all':
        config_data = service.config.get_all_config()
        service.console.print(Panel(json.dumps(config_data, indent=2),
                                    title=f"Configuration ({service.config.config_path})", border_style="cyan"))
        return EXIT_OK

    section_upper = section.upper()
    config_data = service.config.get_section(section_upper)
    if config_data is None:
        available = service.config.get_available_sections()
        service.console.print(f"Configuration section '[{section_upper}]' not found. "
                              f"Available sections: {', '.join(available)}", style="warning", markup=False)
        return EXIT_INVALID
    service.console.print(Panel(json.dumps(config_data, indent=2),
                                title=f"Configuration Section {section_upper}", border_style="cyan"))
    return EXIT_OK


def handle_config_get(service: 'TwoSiteService', section: str, key: str) -> int:
    section_upper = section.upper()
    key_lower = key.lower()
    value = service.config.get(section_upper, key_lower, None)
    if value is None:
        service.console.print(f"Key '[{section_upper}].{key_lower}' not found.", style="warning", markup=False)
        return EXIT_INVALID
    # the value itself goes to stdout
    print(value)
    return EXIT_OK


def handle_config_set(service: 'TwoSiteService', section: str, key: str, value: str) -> int:
    section_upper = section.upper()
    key_lower = key.lower()
    try:
        service.config.set(section_upper, key_lower, value)
    except ValueError as e:
        service.console.print(f"[error]Validation Error:[/error] {e}")
        return EXIT_INVALID
    service.console.print(f"Config '[{section_upper}].{key_lower}' set to '{value}' and saved.",
                          style="info", markup=False)
    return EXIT_OK
