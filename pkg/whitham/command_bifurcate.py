import logging
import math
import sys
from pathlib import Path
from typing import Optional

from whitham.errors import DomainError, ExitCode
from whitham.manifest import RunManifest
from whitham.util import dump_json_atomically
from whitham.waves import expansion_coeffs, find_xi0

__all__ = ["command_bifurcate"]

_logger = logging.getLogger(__name__)


def command_bifurcate(
    out_dir: Path,
    out_file: Path,
    P: Optional[float] = None,
    xi: Optional[float] = None,
    should_find_critical: bool = False,
    seed: Optional[int] = None,
) -> None:
    if (P is None) == (xi is None):
        raise DomainError("Exactly one of period and wavenumber must be given")
    if P is not None:
        if not (math.isfinite(P) and P > 0.0):
            raise DomainError(f"Period must be positive, got {P!r}")
        xi = 2.0 * math.pi / P

    expansion = expansion_coeffs(xi)
    side = "subcritical" if expansion.mu2 < 0.0 else "supercritical"
    _logger.info(
        f"xi = {expansion.xi!r}: mu0 = {expansion.mu0:.12f}, mu2 = {expansion.mu2:.6e} "
        f"({side}), mu4 = {expansion.mu4:.6e}"
    )

    document = expansion.to_dict()
    if should_find_critical:
        critical = find_xi0()
        document["critical"] = critical._asdict()
        print(
            f"xi0 = {critical.xi0:.12f}, P0 = {critical.P0:.12f}, "
            f"mu4(xi0) = {critical.mu4_at_xi0:.6e}"
        )

    out_path = out_dir / out_file
    dump_json_atomically(out_path, document)

    manifest = RunManifest(
        command="bifurcate",
        config={"period": P, "xi": expansion.xi, "find_critical": should_find_critical},
        seed=seed,
    )
    manifest.add_output(out_dir, out_path)
    manifest.write(out_dir)

    _logger.info(f"Wrote {out_path.as_posix()}")
    sys.exit(ExitCode.OK)
