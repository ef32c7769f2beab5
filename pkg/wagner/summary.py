"""## Generation of scalar summaries.
"""

import logging
import re as _re

import numpy as np

from .proto import Summary

logger = logging.getLogger(__name__)

_INVALID_TAG_CHARACTERS = _re.compile(r'[^-/\w\.]')


def _clean_tag(name):
    # TensorBoard groups tags by their '/' prefix; anything outside [-/\w.]
    # is replaced by '_' and leading slashes are dropped.
    if name is not None:
        new_name = _INVALID_TAG_CHARACTERS.sub('_', name)
        new_name = new_name.lstrip('/')
        if new_name != name:
            logger.info('Summary name %s is illegal; using %s instead.', name, new_name)
            name = new_name
    return name


def scalar(name, scalar):
    """Outputs a `Summary` protocol buffer containing a single scalar value.
    Args:
      name: A name for the generated node. Will also serve as the series name in
        TensorBoard.
      scalar: A real number or a one-element array.
    Returns:
      A scalar `Summary` protocol buffer.
    Raises:
      ValueError: If the value is not a single finite number.
    """
    name = _clean_tag(name)
    value = np.asarray(scalar, dtype=float)
    if value.size != 1:
        raise ValueError('scalar summary %s needs one value, got shape %s' % (name, value.shape))
    value = float(value.reshape(()))
    if not np.isfinite(value):
        raise ValueError('scalar summary %s is not finite: %r' % (name, value))
    summary = Summary()
    summary.value.add(tag=name, simple_value=value)
    return summary
