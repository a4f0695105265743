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
__author__ = ("zerolimit contributors",)
__version__ = "0.1.0"
__revision__ = "dev"

import logging


IS_RUNNING = False
SIZE = 1
# Replaced by utils.initLogging once a front-end has configured the run
logger = logging.getLogger()

# Seconds between liveness checks of the local worker processes
TIME_BETWEEN_WORKER_CHECKS = 1
