from dataclasses import dataclass

from django.db import models

from core.exceptions import RenderError

MIN_SIZE_PX = 200


class RenderKind(models.TextChoices):
    CORR_ELLIPSE = 'corr_ellipse', 'Correlation matrix with slanted ellipses'
    SIP_DISK = 'sip_disk', 'SIP matrix with area-proportional disks'
    RANK_HEATMAP = 'rank_heatmap', 'Ranking probability heatmap'
    DELTA_ECDF = 'delta_ecdf', 'ECDF of absolute-error differences'
    ABS_ECDF = 'abs_ecdf', 'ECDF of absolute errors'


# Each kind has one color map; a RenderSpec cannot pick another.
COLOR_MAPS = {
    RenderKind.CORR_ELLIPSE: 'RdBu',
    RenderKind.SIP_DISK: 'blue-white-red',
    RenderKind.RANK_HEATMAP: 'white-darkblue',
    RenderKind.DELTA_ECDF: 'tab:blue',
    RenderKind.ABS_ECDF: 'tab:blue',
}

MATRIX_KINDS = (RenderKind.CORR_ELLIPSE, RenderKind.SIP_DISK, RenderKind.RANK_HEATMAP)


@dataclass(frozen=True)
class RenderSpec:
    """What to draw, how large (pixels, square) and where to write it."""

    kind: RenderKind
    size_px: int = 480
    cmap: str = None
    path: str = None

    def __post_init__(self):
        object.__setattr__(self, 'kind', RenderKind(self.kind))
        if int(self.size_px) < MIN_SIZE_PX:
            raise RenderError(f"render size must be at least {MIN_SIZE_PX} px, got {self.size_px}")
        fixed = COLOR_MAPS[self.kind]
        if self.cmap is not None and self.cmap != fixed:
            raise RenderError(f"{self.kind.label} always uses the '{fixed}' color map")
        object.__setattr__(self, 'cmap', fixed)
        object.__setattr__(self, 'size_px', int(self.size_px))

    @property
    def is_matrix(self):
        return self.kind in MATRIX_KINDS
