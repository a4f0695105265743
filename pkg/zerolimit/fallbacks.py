#
#    This file is part of zerolimit.
#
#    zerolimit is free software: you can redistribute it and/or modify
#    it under the terms of the GNU Lesser General Public License as
#    published by the Free Software Foundation, either version 3 of
#    the License, or (at your option) any later version.
#
#    zerolimit is distributed in the hope that it will be useful,
#    but WITHOUT ANY WARRANTY; without even the implied warranty of
#    MERCHANTABILITY or FITNESS FOR A PARTICULAR PURPOSE. See the
#    GNU Lesser General Public License for more details.
#
#    You should have received a copy of the GNU Lesser General Public
#    License along with zerolimit. If not, see <http://www.gnu.org/licenses/>.
#
"""Builtin fallbacks used when no worker pool was started."""
import sys
from functools import wraps

import zerolimit


def _poolStarted():
    futures = sys.modules.get("zerolimit.futures")
    return futures is not None and \
        futures.__dict__.get("_broker", None) is not None


def ensurePoolStartedMapFallback(func):
    """Replaces a parallel map by the builtin serial map when no pool runs."""
    @wraps(func)
    def wrapper(*args, **kwargs):
        if not _poolStarted():
            if not hasattr(ensurePoolStartedMapFallback, "already"):
                zerolimit.logger.debug("No worker pool started, running "
                                       "tasks in the calling process.")
                ensurePoolStartedMapFallback.already = True
            return map(*args)
        return func(*args, **kwargs)
    return wrapper
