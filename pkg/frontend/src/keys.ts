/**
 * Key state: an Ed25519 seed held in browser-local persistent storage and
 * the device's enrollment status. The private key never leaves this
 * context; only the public key travels to the service, exactly once per
 * profile.
 */

import { ServiceApi } from "./api.js";
import { fromHex, toHex } from "./base64.js";
import { createSigner, generateSeed, type Signer } from "./ed25519.js";

export interface StorageLike {
  getItem(key: string): string | null;
  setItem(key: string, value: string): void;
  removeItem(key: string): void;
}

export interface EnrollmentProfile {
  userId: string;
  label: string;
  deviceClass: "phone" | "watch";
}

interface StoredState {
  seed_hex: string;
  device_id: string | null;
  user_id: string | null;
}

export interface KeyState {
  signer: Signer;
  deviceId: string | null;
  userId: string | null;
}

const STORAGE_KEY = "pushauth.authenticator.v1";

export class KeyStore {
  constructor(private storage: StorageLike) {}

  private read(): StoredState | null {
    const raw = this.storage.getItem(STORAGE_KEY);
    if (raw === null) return null;
    try {
      return JSON.parse(raw) as StoredState;
    } catch {
      return null;
    }
  }

  private write(state: StoredState): void {
    this.storage.setItem(STORAGE_KEY, JSON.stringify(state));
  }

  reset(): void {
    this.storage.removeItem(STORAGE_KEY);
  }

  /** Load or create the key pair without touching the network. */
  async ensureKeys(): Promise<KeyState> {
    let stored = this.read();
    if (stored === null) {
      stored = { seed_hex: toHex(generateSeed()), device_id: null, user_id: null };
      this.write(stored);
    }
    const signer = await createSigner(fromHex(stored.seed_hex));
    return { signer, deviceId: stored.device_id, userId: stored.user_id };
  }

  /** Enroll with the service if this profile has not enrolled before. */
  async ensureEnrolled(api: ServiceApi, profile: EnrollmentProfile): Promise<KeyState> {
    const state = await this.ensureKeys();
    if (state.deviceId !== null && state.userId === profile.userId) {
      return state;
    }
    const record = await api.enrollDevice(
      profile.userId,
      profile.label,
      profile.deviceClass,
      state.signer.publicKey,
    );
    const stored = this.read()!;
    stored.device_id = record.device_id;
    stored.user_id = profile.userId;
    this.write(stored);
    return { signer: state.signer, deviceId: record.device_id, userId: profile.userId };
  }
}

/** In-memory stand-in used by tests and non-browser environments. */
export class MemoryStorage implements StorageLike {
  private map = new Map<string, string>();
  getItem(key: string): string | null {
    return this.map.has(key) ? this.map.get(key)! : null;
  }
  setItem(key: string, value: string): void {
    this.map.set(key, value);
  }
  removeItem(key: string): void {
    this.map.delete(key);
  }
}
