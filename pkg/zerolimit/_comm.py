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
import os
import pickle
import traceback

import zmq

from .broker import INIT, REQUEST, TASK, REPLY, SHUTDOWN, LINGER_TIME, \
    encodeIndex, decodeIndex
from .exceptions import RemoteError


class Shutdown(Exception):
    pass


class ZMQCommunicator(object):
    """Worker side of the broker connection."""

    def __init__(self, hostname, port):
        self.ZMQcontext = zmq.Context()
        self.socket = self.ZMQcontext.socket(zmq.DEALER)
        self.socket.setsockopt(zmq.LINGER, LINGER_TIME)
        self.socket.connect("tcp://{0}:{1}".format(hostname, port))
        self.socket.send_multipart([INIT, str(os.getpid()).encode()])

    def recvTask(self):
        """Asks for a task and blocks until one arrives.

        :returns: (index, pickled (function, args)).

        :raises Shutdown: when the broker closes the pool."""
        self.socket.send_multipart([REQUEST])
        msg = self.socket.recv_multipart()
        if msg[0] == SHUTDOWN:
            raise Shutdown()
        if msg[0] != TASK:
            raise ValueError("unexpected message {0!r}".format(msg[0]))
        return decodeIndex(msg[1]), msg[2]

    def sendResult(self, index, success, value):
        try:
            payload = pickle.dumps((success, value), pickle.HIGHEST_PROTOCOL)
        except Exception:
            error = RemoteError(repr(value), traceback.format_exc())
            payload = pickle.dumps((False, error), pickle.HIGHEST_PROTOCOL)
        self.socket.send_multipart([REPLY, encodeIndex(index), payload])

    def shutdown(self):
        self.ZMQcontext.destroy(LINGER_TIME)
