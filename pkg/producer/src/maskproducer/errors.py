"""Error taxonomy for the producer."""


class ProducerError(Exception):
    """Base class for producer failures."""


class InputError(ProducerError):
    """Malformed input document, image, or polygon set."""


class ModelError(ProducerError):
    """Segmentation model could not be loaded or run."""
