#!/usr/bin/env python3
"""Independent arithmetic for the numbers frozen into the C++ tests.

Each block recomputes a value from first principles (plain floats, no project
code) and prints it with the name used in the test that freezes it.
"""
import math
import random

C = 299_792_458.0
L1 = 1575.42e6


def doppler_radial_approach():
    # Range rate of a satellite closing at 1000 m/s is -1000 m/s; the received
    # carrier is shifted by -range_rate / c * f_c (approach raises frequency).
    range_rate = -1000.0
    return -range_rate / C * L1


def framed_rate(sample_rate, bits, frame_samples, header=34):
    payload = frame_samples * bits * 2 // 8
    return sample_rate * bits * 2 * (1 + header / payload)


def header_size():
    fields = {"magic": 4, "version": 1, "sequence": 8, "start_time_ns": 8,
              "sample_rate": 4, "bits": 1, "sample_count": 4, "crc32": 4}
    return sum(fields.values()), sum(v for k, v in fields.items() if k != "crc32")


def congestion_gap(outage=2.0, jitter_buffer=0.25):
    return max(0.0, outage - jitter_buffer)


def starvation_fraction(link=11e6, offered=framed_rate(1.024e6, 16, 4096)):
    return 1.0 - link / offered


def quantization_snr_db(bits, n=100_000, seed=3):
    # Full-scale complex tone through round(x * (2^(b-1) - 1)) / (2^(b-1) - 1).
    rng = random.Random(seed)
    m = 2 ** (bits - 1) - 1
    sig = err = 0.0
    phase0 = rng.random() * 2 * math.pi
    for k in range(n):
        ph = phase0 + 2 * math.pi * 0.0123457 * k
        for x in (math.cos(ph), math.sin(ph)):
            q = round(x * m) / m
            sig += x * x
            err += (q - x) ** 2
    return 10 * math.log10(sig / err)


def clock_shift_5ms():
    return C * 5e-3


def main():
    print(f"doppler_radial_1000mps_L1_hz {doppler_radial_approach():.6f}")
    total, crc_offset = header_size()
    print(f"header_bytes {total} crc_offset {crc_offset}")
    print(f"required_rate_1MHz_16bit {1e6 * 16 * 2:.1f}")
    print(f"required_rate_2MHz_8bit {2e6 * 8 * 2:.1f}")
    print(f"framed_rate_1.024MHz_16bit_4096 {framed_rate(1.024e6, 16, 4096):.3f}")
    print(f"framed_overhead_4096_16bit {total}/{4096 * 4} = {total / (4096 * 4):.9f}")
    print(f"congestion_gap_s {congestion_gap():.6f} tolerance_one_frame_s {4096 / 1.024e6:.6f}")
    print(f"starvation_fraction_11Mbps {starvation_fraction():.6f}")
    for b in (4, 8, 12, 16):
        print(f"quantization_snr_db bits={b} {quantization_snr_db(b):.2f} bound {6 * b - 10}")
    print(f"rx_clock_bias_1ms_m {C * 1e-3:.6f}")
    print(f"clock_shift_5ms_m {clock_shift_5ms():.6f}")
    print(f"half_chip_range_m {C * 0.5 / 1.023e6:.3f}")


if __name__ == "__main__":
    main()
