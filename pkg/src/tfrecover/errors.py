class FormatError(ValueError):
    """A file (PGM, sidecar JSON, CSV) is malformed or unsupported."""


class PipelineError(RuntimeError):
    """A pipeline stage failed; carries the stage name."""

    def __init__(self, stage, message):
        super().__init__(f"[{stage}] {message}")
        self.stage = stage
