# -*- coding: utf-8 -*-

"""
This module provides utility functions that are used within the package.
"""

import errno
import hashlib
import json
import logging
import os
import tempfile


class ConfigError(ValueError):
    """
    Raised if a configuration record holds an invalid value.
    """


class DomainError(ValueError):
    """
    Raised if a function is called outside of its mathematical domain.
    """


def slurp_json(filename):
    with open(filename) as file_object:
        return json.load(file_object)


def is_debug_run():
    """
    Check whether we're running with DEBUG loglevel.

    @return: True if running with DEBUG loglevel.
    @rtype: bool
    """
    return logging.getLogger().isEnabledFor(logging.DEBUG)


def mkdir_p(path, mode=0o777):
    """
    Create subdirectory hierarchy given in the paths argument.
    """

    try:
        os.makedirs(path, mode)
    except OSError as exc:
        if exc.errno == errno.EEXIST and os.path.isdir(path):
            pass
        else:
            raise


def write_atomically(filename, text):
    """
    Write text to filename through a temporary file in the same directory,
    so that readers never observe a partially written file.

    @param filename: Destination path.
    @type filename: str

    @param text: Full file contents.
    @type text: str
    """
    directory = os.path.dirname(os.path.abspath(filename))
    mkdir_p(directory)
    fd, tmp_name = tempfile.mkstemp(dir=directory, prefix='.tmp-')
    try:
        with os.fdopen(fd, 'w', newline='') as file_object:
            file_object.write(text)
        os.replace(tmp_name, filename)
    except BaseException:
        try:
            os.remove(tmp_name)
        except OSError:
            pass
        raise


def spit_json_atomically(obj, filename):
    write_atomically(filename,
                     json.dumps(obj, indent=4, sort_keys=True) + '\n')


def canonical_json(obj):
    """
    Serialize obj deterministically: sorted keys, no whitespace.
    """
    return json.dumps(obj, sort_keys=True, separators=(',', ':'))


def config_digest(obj, length=16):
    """
    Short SHA-256 digest of the canonical JSON form of obj.

    @param obj: JSON-serializable configuration.
    @type obj: dict

    @return: Hex digest prefix.
    @rtype: str
    """
    payload = canonical_json(obj).encode('utf-8')
    return hashlib.sha256(payload).hexdigest()[:length]


def format_float(value):
    """
    Render a float for CSV output so that reruns produce identical bytes.
    """
    if value is None:
        return ''
    return repr(float(value))
