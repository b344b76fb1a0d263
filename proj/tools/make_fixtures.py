#!/usr/bin/env python3
# Copyright 2026 The SpecNet Authors. All Rights Reserved.
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
# ==============================================================================

"""Regenerates the miniature dataset trees under tests/fixtures.

us8k/                    UrbanSound8K layout, 20 clips, 2 per fold, tone vs noise
speech_commands/         Speech Commands layout, left/right, 8 clips per word
speech_commands_mini/    left/right, 3 clips per word, one listed for testing
"""
import pathlib
import wave

import numpy as np

ROOT = pathlib.Path(__file__).resolve().parent.parent / "tests" / "fixtures"


def write_wav(path, samples, rate):
    path.parent.mkdir(parents=True, exist_ok=True)
    pcm = np.clip(np.round(samples * 32767.0), -32768, 32767).astype("<i2")
    with wave.open(str(path), "wb") as w:
        w.setnchannels(1)
        w.setsampwidth(2)
        w.setframerate(rate)
        w.writeframes(pcm.tobytes())


def tone(rng, rate, seconds, freq):
    t = np.arange(int(rate * seconds)) / rate
    phase = rng.uniform(0, 2 * np.pi)
    return 0.5 * np.sin(2 * np.pi * freq * t + phase) + 0.01 * rng.standard_normal(t.size)


def noise(rng, rate, seconds):
    return 0.3 * rng.standard_normal(int(rate * seconds)).clip(-3, 3) / 3


def make_us8k(rng):
    base = ROOT / "us8k"
    rows = ["slice_file_name,fsID,start,end,salience,fold,classID,class"]
    rate = 8000
    for fold in range(1, 11):
        for kind, class_id, name in (("tone", 8, "siren"), ("noise", 0, "air_conditioner")):
            fname = f"{fold}{class_id}-{kind}-0-0.wav"
            if kind == "tone":
                data = tone(rng, rate, 0.5, rng.uniform(600, 900))
            else:
                data = noise(rng, rate, 0.5)
            write_wav(base / "audio" / f"fold{fold}" / fname, data, rate)
            rows.append(f"{fname},{fold}{class_id},0.0,0.5,1,{fold},{class_id},{name}")
    (base / "metadata").mkdir(parents=True, exist_ok=True)
    (base / "metadata" / "UrbanSound8K.csv").write_text("\n".join(rows) + "\n")


def make_speech(name, per_word, n_val, n_test, rng):
    base = ROOT / name
    rate = 16000
    val, test = [], []
    for word, freq in (("left", 400.0), ("right", 1800.0)):
        for k in range(per_word):
            fname = f"{k:08x}_nohash_0.wav"
            write_wav(base / word / fname, tone(rng, rate, 1.0, freq * rng.uniform(0.95, 1.05)), rate)
            rel = f"{word}/{fname}"
            if k < n_test:
                test.append(rel)
            elif k < n_test + n_val:
                val.append(rel)
    (base / "validation_list.txt").write_text("".join(f"{v}\n" for v in val))
    (base / "testing_list.txt").write_text("".join(f"{t}\n" for t in test))


def make_speech_mini(rng):
    base = ROOT / "speech_commands_mini"
    rate = 16000
    for word, freq in (("left", 400.0), ("right", 1800.0)):
        for k in range(3):
            write_wav(base / word / f"{k:08x}_nohash_0.wav", tone(rng, rate, 0.25, freq), rate)
    (base / "validation_list.txt").write_text("")
    (base / "testing_list.txt").write_text("left/00000000_nohash_0.wav\n")


def main():
    rng = np.random.default_rng(20190525)
    make_us8k(rng)
    make_speech("speech_commands", per_word=8, n_val=2, n_test=2, rng=rng)
    make_speech_mini(rng)


if __name__ == "__main__":
    main()
