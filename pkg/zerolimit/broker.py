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
from collections import deque
import pickle
import time

import zmq

import zerolimit
from .exceptions import WorkerLost


# Worker requests
INIT = b"I"
REQUEST = b"RQ"
TASK = b"T"
REPLY = b"RP"
SHUTDOWN = b"S"

LINGER_TIME = 1000


def encodeIndex(index):
    return str(index).encode()


def decodeIndex(raw):
    return int(raw.decode())


class Broker(object):
    """Hands pickled tasks to local workers and collects their replies.

    Results are stored by task index, so their order never depends on
    completion order."""
    def __init__(self, hostname="127.0.0.1"):
        self.context = zmq.Context(1)
        self.hostname = hostname

        # zmq Socket for the tasks, replies and request.
        self.task_socket = self.context.socket(zmq.ROUTER)
        self.task_socket.setsockopt(zmq.ROUTER_MANDATORY, 1)
        self.task_socket.setsockopt(zmq.LINGER, LINGER_TIME)
        self.task_socket.setsockopt(zmq.SNDHWM, 0)
        self.task_socket.setsockopt(zmq.RCVHWM, 0)
        self.t_sock_port = self.task_socket.bind_to_random_port(
            "tcp://{0}".format(hostname)
        )
        self.name = "{0}:{1}".format(hostname, self.t_sock_port)

        self.available_workers = deque()
        self.unassigned_tasks = deque()
        # worker address: (task index, payload)
        self.assigned_tasks = {}
        self.worker_pids = {}
        # Callable returning the pids of the living workers
        self.alive = None

    def run(self, func, tasks):
        """Executes ``func(*args)`` for every args tuple of ``tasks``.

        :returns: A dict mapping task index to (success, value).

        :raises WorkerLost: if every worker died."""
        for index, args in enumerate(tasks):
            payload = pickle.dumps((func, args), pickle.HIGHEST_PROTOCOL)
            self.unassigned_tasks.append((index, payload))
        results = {}
        lastCheck = time.time()
        while len(results) < len(tasks):
            self.dispatch()
            if self.task_socket.poll(
                    zerolimit.TIME_BETWEEN_WORKER_CHECKS * 1000):
                self.processMessage(self.task_socket.recv_multipart(),
                                    results)
            if time.time() - lastCheck > zerolimit.TIME_BETWEEN_WORKER_CHECKS:
                self.checkWorkers()
                lastCheck = time.time()
        return results

    def dispatch(self):
        """Gives queued tasks to idle workers."""
        while self.available_workers and self.unassigned_tasks:
            address = self.available_workers.popleft()
            index, payload = self.unassigned_tasks.popleft()
            try:
                self.task_socket.send_multipart([address, TASK,
                                                 encodeIndex(index), payload])
            except zmq.ZMQError:
                # Worker disconnected
                self.unassigned_tasks.appendleft((index, payload))
                continue
            zerolimit.logger.debug("Sent task {0}".format(index))
            self.assigned_tasks[address] = (index, payload)

    def processMessage(self, msg, results):
        address, msg_type = msg[0], msg[1]

        # Request for task
        if msg_type == REQUEST:
            self.available_workers.append(address)

        # Answer of an assigned task
        elif msg_type == REPLY:
            index = decodeIndex(msg[2])
            self.assigned_tasks.pop(address, None)
            try:
                results[index] = pickle.loads(msg[3])
            except Exception as e:
                results[index] = (False, e)
            zerolimit.logger.debug("Received result {0}".format(index))

        # A new worker announces its pid
        elif msg_type == INIT:
            self.worker_pids[address] = int(msg[2].decode())

    def checkWorkers(self):
        """Requeues the task of every dead worker."""
        if self.alive is None:
            return
        alive = self.alive()
        if not alive:
            raise WorkerLost("every worker of the pool died")
        for address, pid in list(self.worker_pids.items()):
            if pid in alive:
                continue
            zerolimit.logger.warning("Worker {0} died.".format(pid))
            del self.worker_pids[address]
            if address in self.available_workers:
                self.available_workers.remove(address)
            task = self.assigned_tasks.pop(address, None)
            if task is not None:
                self.unassigned_tasks.appendleft(task)

    def shutdown(self):
        for address in self.worker_pids:
            try:
                self.task_socket.send_multipart([address, SHUTDOWN])
            except zmq.ZMQError:
                pass
        time.sleep(0.1)
        self.context.destroy(LINGER_TIME)
