"""Exception hierarchy shared across the package."""


class SkinToneAuditError(Exception):
    """Base class for all errors raised by this package."""


class DimensionMismatchError(SkinToneAuditError):
    """Image and mask (or two masks) have different pixel dimensions."""


class EmptyRegionError(SkinToneAuditError):
    """A mask excludes every pixel, leaving nothing to measure."""


class DegeneratePointError(SkinToneAuditError):
    """The tone angle is undefined at lightness 50 with zero yellow component."""


class MissingItaError(SkinToneAuditError):
    """Prediction records reference image ids without a tone estimate."""

    def __init__(self, image_ids):
        self.image_ids = sorted(image_ids)
        super().__init__(
            "no ITA estimate for image ids: " + ", ".join(self.image_ids)
        )


class UnknownLabelError(SkinToneAuditError):
    """A prediction uses a label outside the declared label set."""


class ZeroVarianceError(SkinToneAuditError):
    """A correlation input has no variance."""


class UnrepresentableColorError(SkinToneAuditError):
    """A requested Lab color falls outside the 8-bit sRGB gamut."""


class DecodeError(SkinToneAuditError):
    """An image or mask file could not be decoded as 8-bit PNG/JPEG."""
