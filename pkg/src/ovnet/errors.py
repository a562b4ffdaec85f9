"""Exception hierarchy.

Anything deriving from :class:`ValidationError` means the caller handed in
bad input; everything else under :class:`OvnetError` is a failure that
happened while doing the work. The CLI maps the two onto exit codes 2 and 3.
"""


class OvnetError(Exception):
    pass


class ValidationError(OvnetError, ValueError):
    pass


class DimensionMismatchError(ValidationError):
    pass


class CutClusterError(ValidationError):
    def __init__(self, cluster_id, plane_index, clearance):
        self.cluster_id = cluster_id
        self.plane_index = plane_index
        self.clearance = clearance
        super().__init__(
            f"plane {plane_index} cuts cluster {cluster_id} (clearance {clearance:.6g})"
        )


class DuplicateCodeError(ValidationError):
    def __init__(self, groups):
        self.groups = [sorted(g) for g in groups]
        super().__init__(f"clusters share orientation codes: {self.groups}")


class SingularSystemError(OvnetError):
    pass


class NotSeparatingError(OvnetError):
    pass


class NonFiniteError(OvnetError):
    def __init__(self, message, layer=None, epoch=None):
        self.layer = layer
        self.epoch = epoch
        super().__init__(message)


class PlannerError(OvnetError):
    pass
