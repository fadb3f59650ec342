"""dvbench: a de Vries duality workbench over finite and eventually periodic sets."""

from __future__ import annotations

__version__ = "0.1.0"
