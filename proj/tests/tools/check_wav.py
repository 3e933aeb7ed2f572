# Copyright 2026 The srnn Authors. All Rights Reserved.
#
# Licensed under the Apache License, Version 2.0 (the "License");
# you may not use this file except in compliance with the License.
# You may obtain a copy of the License at
#
#     http://www.apache.org/licenses/LICENSE-2.0
#
# Unless required by applicable law or agreed to in writing, software
# distributed under the License is distributed on an "AS IS" BASIS,
# WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
# See the License for the specific language governing permissions and
# limitations under the License.

"""Reads the acceptance codec file with Python's wave module.

The file holds every 16-bit value from -32767 to 32767 in order, mono, 22050 Hz.
"""
import struct
import sys
import wave


def main(path):
    with wave.open(path, "rb") as w:
        assert w.getnchannels() == 1, w.getnchannels()
        assert w.getsampwidth() == 2, w.getsampwidth()
        assert w.getframerate() == 22050, w.getframerate()
        assert w.getcomptype() == "NONE"
        n = w.getnframes()
        assert n == 65535, n
        frames = w.readframes(n)
    values = struct.unpack("<%dh" % n, frames)
    assert list(values) == list(range(-32767, 32768)), "payload mismatch"
    print("wave module: %d frames, 1 channel, 16-bit, 22050 Hz, payload exact" % n)


if __name__ == "__main__":
    main(sys.argv[1])
