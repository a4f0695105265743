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
"""Worker process: connects to the broker and executes tasks until it is
told to shut down."""
import sys
import os
import argparse
import pickle

try:
    import psutil
except ImportError:
    psutil = None

import zerolimit
from .. import utils
from .._comm import ZMQCommunicator, Shutdown


class Bootstrap(object):
    """Sets up the broker link of a worker and serves tasks."""
    def __init__(self):
        self.parser = None
        self.args = None
        self.verbose = 0

    def main(self):
        if self.args is None:
            self.parse()
        self.log = utils.initLogging(self.verbose)
        self.setWorker()
        self.run()

    def makeParser(self):
        """Generate the argparse parser object containing the bootloader
           accepted parameters
        """
        self.parser = argparse.ArgumentParser(
            description='Starts a zerolimit worker.',
            prog="{0} -m zerolimit.bootstrap".format(sys.executable),
        )
        self.parser.add_argument('--brokerHostname',
                                 help="The routable hostname of the broker",
                                 default="127.0.0.1")
        self.parser.add_argument('--taskPort',
                                 help="The port of the broker task socket",
                                 type=int,
                                 required=True)
        self.parser.add_argument('--nice',
                                 help="Adjust the niceness of the process",
                                 type=int,
                                 default=0)
        self.parser.add_argument('--verbose', '-v', action='count',
                                 help="Verbosity level (-vv for more)",
                                 default=0)

    def parse(self, argv=None):
        """Generate a argparse parser and parse the command-line arguments"""
        if self.parser is None:
            self.makeParser()
        self.args = self.parser.parse_args(argv)
        self.verbose = self.args.verbose

    def setWorker(self):
        """Setup the zerolimit globals of this worker."""
        zerolimit.IS_RUNNING = True
        zerolimit.logger = self.log
        if self.args.nice:
            if not psutil:
                zerolimit.logger.error("psutil not installed.")
                raise ImportError("psutil is needed for nice functionnality.")
            p = psutil.Process(os.getpid())
            p.nice(self.args.nice)

    def run(self):
        """Executes tasks until the broker shuts the pool down."""
        comm = ZMQCommunicator(self.args.brokerHostname, self.args.taskPort)
        try:
            while True:
                try:
                    index, payload = comm.recvTask()
                except Shutdown:
                    break
                try:
                    func, args = pickle.loads(payload)
                    value = func(*args)
                except Exception as e:
                    zerolimit.logger.debug("Task {0} raised {1!r}".format(
                        index, e))
                    comm.sendResult(index, False, e)
                else:
                    comm.sendResult(index, True, value)
        finally:
            comm.shutdown()


if __name__ == "__main__":
    b = Bootstrap()
    b.main()
